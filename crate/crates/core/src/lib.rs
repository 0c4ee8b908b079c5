//! Exact symbolic maximization of quadratic objectives under linear
//! constraints that carry one free parameter `PD`.
//!
//! Everything here is exact: rationals, polynomials and rational functions in
//! `PD`, real-root isolation over rational intervals, and an active-set
//! optimizer that returns the optimum as a piecewise closed form over the
//! parameter domain. The [`chsh`] module builds the relaxed
//! parameter-independence CHSH problems and hidden-variable models on top of
//! it, and [`oracle`] is an independent fixed-`PD` maximizer used to audit
//! the symbolic pipeline.
//!
//! The crate is `no_std` and only needs `alloc`. Threading, files and the
//! command line live in the `bellbound` companion crate.
#![no_std]
#![warn(rust_2018_idioms, missing_debug_implementations)]

extern crate alloc;

pub mod chsh;
mod error;
pub mod linear;
pub mod optimizer;
pub mod oracle;
pub mod poly;
pub mod ratfun;
pub mod rational;
pub mod roots;
pub mod threshold;

pub use error::{Error, Result};
pub use linear::{LinExpr, QuadExpr, Solution, SolutionKind, VarId};
pub use poly::ParamPoly;
pub use ratfun::ParamRat;
pub use rational::Rational;
pub use roots::{Breakpoint, ParamInterval, RootBracket, Sign};
