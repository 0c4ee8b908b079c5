//! Bound curves as CSV: `pd,bound[,tsirelson]` rows at equally spaced
//! rational samples, then `#` comment lines with thresholds.

use std::fmt::Write;

use bellbound_core::optimizer::PiecewiseBound;
use bellbound_core::rational::{to_decimal, Rational};
use bellbound_core::threshold::{Target, Threshold};

use crate::report::APPROX_DIGITS;

/// `samples` equally spaced points from `lo` to `hi` inclusive.
pub fn sample_points(lo: &Rational, hi: &Rational, samples: usize) -> Vec<Rational> {
    assert!(samples >= 2, "a curve needs at least two samples");
    let steps = Rational::from_integer((samples as i64 - 1).into());
    (0..samples)
        .map(|k| lo + (hi - lo) * Rational::from_integer((k as i64).into()) / &steps)
        .collect()
}

pub fn curve_csv(
    bound: &PiecewiseBound,
    domain: &(Rational, Rational),
    samples: usize,
    quantum_line: bool,
    thresholds: &[(Target, Threshold)],
) -> String {
    let mut out = String::from(if quantum_line {
        "pd,bound,tsirelson\n"
    } else {
        "pd,bound\n"
    });
    let tsirelson = Target::tsirelson().to_decimal(APPROX_DIGITS);
    for pd in sample_points(&domain.0, &domain.1, samples) {
        let value = bound
            .value_at(&pd)
            .map(|v| to_decimal(&v, APPROX_DIGITS))
            .unwrap_or_default();
        write!(out, "{},{value}", to_decimal(&pd, APPROX_DIGITS)).unwrap();
        if quantum_line {
            write!(out, ",{tsirelson}").unwrap();
        }
        out.push('\n');
    }
    for (target, t) in thresholds {
        writeln!(
            out,
            "# threshold {target}: pd = {} ({})",
            t.at.to_decimal(APPROX_DIGITS),
            t.at
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellbound_core::rational::{int, rat};

    #[test]
    fn samples_are_exact() {
        let pts = sample_points(&int(0), &int(1), 5);
        assert_eq!(pts, vec![int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)]);
    }
}
