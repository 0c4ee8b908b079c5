//! Machine-readable run reports. Exact values are `"p/q"` strings or
//! expression text; fields named `approx` hold decimal renderings and are
//! approximate. Reports carry no timing or worker count, so the same problem
//! always serializes to the same bytes.

use std::collections::BTreeMap;

use bellbound_core::optimizer::{EnumerationStats, ProblemSpec, Segment, Solved};
use bellbound_core::threshold::{Target, Threshold};
use bellbound_core::Breakpoint;
use serde::Serialize;

use crate::files::witness_strings;

/// Significant digits of every `approx` field.
pub const APPROX_DIGITS: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Endpoint {
    /// `"p/q"` for a rational point; absent for an algebraic one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// Square-free polynomial with the point as its only root inside
    /// `isolating_interval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_of: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isolating_interval: Option<[String; 2]>,
    pub approx: String,
}

impl Endpoint {
    pub fn new(b: &Breakpoint) -> Self {
        let approx = b.to_decimal(APPROX_DIGITS);
        match b {
            Breakpoint::Rational(r) => Endpoint {
                exact: Some(r.to_string()),
                root_of: None,
                isolating_interval: None,
                approx,
            },
            Breakpoint::Root(br) => Endpoint {
                exact: None,
                root_of: Some(br.poly.to_string()),
                isolating_interval: Some([br.lo.to_string(), br.hi.to_string()]),
                approx,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentReport {
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub value: String,
    /// Indices into the problem's constraint list.
    pub active: Vec<usize>,
    pub witness: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdReport {
    pub target: String,
    pub target_approx: String,
    pub pd: Endpoint,
    pub equation: String,
    pub segment: usize,
}

impl ThresholdReport {
    pub fn new(target: &Target, t: &Threshold) -> Self {
        ThresholdReport {
            target: target.to_string(),
            target_approx: target.to_decimal(APPROX_DIGITS),
            pd: Endpoint::new(&t.at),
            equation: format!("{} = 0", t.equation),
            segment: t.segment,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub subsets_attempted: u64,
    pub consistent: u64,
    pub inconsistent: u64,
    pub redundant: u64,
    pub vertices: u64,
    pub stationary_points: u64,
    pub ridges_discarded: u64,
    pub no_stationary_point: u64,
    pub candidates_unique: u64,
    pub candidates_kept: u64,
}

impl From<&EnumerationStats> for StatsReport {
    fn from(s: &EnumerationStats) -> Self {
        StatsReport {
            subsets_attempted: s.subsets_attempted,
            consistent: s.consistent,
            inconsistent: s.inconsistent,
            redundant: s.redundant,
            vertices: s.vertices,
            stationary_points: s.stationary_points,
            ridges_discarded: s.ridges_discarded,
            no_stationary_point: s.no_stationary_point,
            candidates_unique: s.candidates_unique,
            candidates_kept: s.candidates_feasible,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub problem: String,
    pub parameter: String,
    pub variables: Vec<String>,
    pub domain: [String; 2],
    pub segments: Vec<SegmentReport>,
    pub thresholds: Vec<ThresholdReport>,
    pub stats: StatsReport,
}

pub fn segment_report(spec: &ProblemSpec, s: &Segment) -> SegmentReport {
    SegmentReport {
        lo: Endpoint::new(&s.interval.lo),
        hi: Endpoint::new(&s.interval.hi),
        value: s.value.to_string(),
        active: s.active.clone(),
        witness: witness_strings(spec, &s.witness),
    }
}

impl RunReport {
    pub fn new(spec: &ProblemSpec, solved: &Solved, thresholds: &[(Target, Threshold)]) -> Self {
        let (lo, hi) = spec.domain();
        RunReport {
            problem: spec.name().to_string(),
            parameter: crate::files::PARAMETER.to_string(),
            variables: spec.variables().to_vec(),
            domain: [lo.to_string(), hi.to_string()],
            segments: solved.bound.segments.iter().map(|s| segment_report(spec, s)).collect(),
            thresholds: thresholds.iter().map(|(t, th)| ThresholdReport::new(t, th)).collect(),
            stats: StatsReport::from(&solved.stats),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
