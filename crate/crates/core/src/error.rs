use alloc::string::String;

use crate::rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("denominator vanishes at PD = {at}")]
    PoleAtPoint { at: Rational },
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("sign changes inside interval {interval}")]
    SignChangesInside { interval: String },
    #[error("pole inside interval {interval}")]
    PoleInsideInterval { interval: String },
    #[error("cannot substitute an inconsistent solution")]
    InconsistentSolution,
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("objective is not quadratic: {0}")]
    NonQuadraticObjective(String),
    #[error("constraint is not linear: {0}")]
    NonlinearConstraint(String),
    #[error("parameter domain {0} is empty")]
    EmptyDomain(String),
    #[error("no candidate optimum is feasible anywhere in the domain")]
    EmptyCandidateSet,
    #[error("audit failed at PD = {at}: {condition}")]
    AuditFailure { at: Rational, condition: String },
    #[error("probability out of range in setting {setting}: {bound} fails on {intervals}")]
    ProbabilityOutOfRange {
        setting: String,
        bound: String,
        intervals: String,
    },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown model name {0}")]
    UnknownModelName(String),
    #[error("parameter {value} outside [0, 1]")]
    ParameterOutOfRange { value: Rational },
    #[error("PD = {value} outside the domain {domain}")]
    OutsideDomain { value: Rational, domain: String },
    #[error("variable block is unbounded")]
    UnboundedBlock,
    #[error("problem does not split into two bilinearly coupled blocks: {0}")]
    NonBipartiteStructure(String),
    #[error("target {0} is outside the range of the bound")]
    TargetOutOfRange(String),
}

impl Error {
    /// Stable identifier used by reports and exit messages.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::PoleAtPoint { .. } => "PoleAtPoint",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::SignChangesInside { .. } => "SignChangesInside",
            Error::PoleInsideInterval { .. } => "PoleInsideInterval",
            Error::InconsistentSolution => "InconsistentSolution",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::DuplicateVariable(_) => "DuplicateVariable",
            Error::NonQuadraticObjective(_) => "NonQuadraticObjective",
            Error::NonlinearConstraint(_) => "NonlinearConstraint",
            Error::EmptyDomain { .. } => "EmptyDomain",
            Error::EmptyCandidateSet => "EmptyCandidateSet",
            Error::AuditFailure { .. } => "AuditFailure",
            Error::ProbabilityOutOfRange { .. } => "ProbabilityOutOfRange",
            Error::InvalidModel(_) => "InvalidModel",
            Error::UnknownModelName(_) => "UnknownModelName",
            Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::UnboundedBlock => "UnboundedBlock",
            Error::NonBipartiteStructure(_) => "NonBipartiteStructure",
            Error::TargetOutOfRange(_) => "TargetOutOfRange",
        }
    }
}
