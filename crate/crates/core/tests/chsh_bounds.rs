use bellbound_core::chsh::{self, build_problem, builtin_inputs, builtin_model, chsh_value, Mode};
use bellbound_core::optimizer::solve;
use bellbound_core::rational::{int, rat};
use bellbound_core::{ParamPoly, ParamRat};

fn poly(c: &[i64]) -> ParamRat {
    ParamPoly::new(c.iter().map(|&k| int(k)).collect()).into()
}

#[test]
fn builtin_models_saturate_their_bound() {
    let one = solve(&build_problem(Mode::OneWay)).unwrap();
    assert_eq!(one.segments.len(), 1);
    assert_eq!(one.segments[0].value, poly(&[2, 2]));
    for name in ["table1", "table2", "table3"] {
        let h = builtin_model(name).unwrap();
        let (_, mode) = builtin_inputs(name).unwrap();
        let sample = h.validity().sample().unwrap();
        let bound = match mode {
            Mode::OneWay => &one,
            Mode::TwoWay => continue,
        };
        assert_eq!(chsh_value(&h), bound.segment_at(&sample).unwrap().value, "{name}");
    }
}

#[test]
fn pawlowski_is_optimal_for_one_way() {
    for p in [int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)] {
        let h = chsh::pawlowski_model(&p).unwrap();
        let m = chsh::measures(&h, &p).unwrap();
        assert_eq!(m.pd_b_to_a, p);
        let v = chsh_value(&h).as_constant().unwrap();
        assert_eq!(v, int(2) * &p + int(2));
    }
}
