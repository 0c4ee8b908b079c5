use std::path::Path;

use bellbound::files::{resolve_model, resolve_problem, FileError, ModelFile, ProblemFile};
use bellbound_core::chsh::{self, build_problem, Mode};
use bellbound_core::optimizer::solve;
use bellbound_core::rational::{int, rat};
use bellbound_core::{Error, ParamRat};

fn toy_path() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/problems/toy.json"))
}

#[test]
fn builtin_problems_round_trip() {
    for mode in [Mode::OneWay, Mode::TwoWay] {
        let spec = build_problem(mode);
        let file = ProblemFile::from_spec(&spec).unwrap();
        let again = ProblemFile::from_json(&file.to_json()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_spec().unwrap(), spec);
    }
}

#[test]
fn toy_file_solves_to_constant_one() {
    let spec = ProblemFile::read(toy_path()).unwrap().to_spec().unwrap();
    assert_eq!(spec.constraints().len(), 5);
    let b = solve(&spec).unwrap();
    assert_eq!(b.segments.len(), 1);
    assert_eq!(b.segments[0].value, ParamRat::constant(int(1)));
}

#[test]
fn greater_equal_is_negated() {
    let spec = ProblemFile::read(toy_path()).unwrap().to_spec().unwrap();
    // m >= 0 becomes -m <= 0
    let c = &spec.constraints()[0];
    assert_eq!(c.expr.coeff(spec.var("m").unwrap()), ParamRat::constant(int(-1)));
    assert!(c.expr.constant_term().is_zero());
}

fn toy_json() -> String {
    std::fs::read_to_string(toy_path()).unwrap()
}

#[test]
fn schema_errors() {
    let bad_param = toy_json().replace("\"name\": \"toy\",", "\"name\": \"toy\", \"parameter\": \"q\",");
    assert!(matches!(
        ProblemFile::from_json(&bad_param).unwrap().to_spec(),
        Err(FileError::Schema(_))
    ));

    let unknown = toy_json().replace("\"var\": \"n\"", "\"var\": \"z\"");
    assert!(matches!(
        ProblemFile::from_json(&unknown).unwrap().to_spec(),
        Err(FileError::Core(Error::UnknownVariable(v))) if v == "z"
    ));

    let extra = toy_json().replace("\"name\": \"toy\",", "\"name\": \"toy\", \"colour\": 1,");
    assert!(matches!(ProblemFile::from_json(&extra), Err(FileError::Json(_))));

    let bad_rel = toy_json().replacen("\">=\"", "\"<\"", 1);
    assert!(matches!(
        ProblemFile::from_json(&bad_rel).unwrap().to_spec(),
        Err(FileError::Schema(_))
    ));

    let bad_num = toy_json().replace("\"coeff\": \"4\"", "\"coeff\": \"four\"");
    assert!(matches!(
        ProblemFile::from_json(&bad_num).unwrap().to_spec(),
        Err(FileError::Rational(_))
    ));

    assert!(matches!(
        resolve_problem("/nonexistent/problem.json"),
        Err(FileError::Io(_))
    ));
}

#[test]
fn model_files_round_trip() {
    for name in ["table1", "table2", "table3"] {
        let h = chsh::builtin_model(name).unwrap();
        let file = ModelFile::from_model(name, &h).unwrap();
        let again = ModelFile::from_json(&file.to_json()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_model().unwrap(), h);
    }
    let h = resolve_model("pawlowski:1/3").unwrap();
    assert_eq!(chsh::chsh_value(&h), ParamRat::constant(rat(8, 3)));
    assert!(resolve_model("table9").is_err());
}
