//! Two-qubit correlation workbench.
//!
//! * [`quantum`]: dense expectation values for pure two-qubit states.
//! * [`criteria`]: CHSH functional, covariance criterion `G(a, b)`, verdicts.
//! * [`hv`]: local hidden-variables models sampled by Monte Carlo.
//! * [`optimizer`]: configuration searches and threshold crossings.
//! * [`experiments`]: figure data and CSV output.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the tolerances in the
//! test suite assume.

#![allow(clippy::needless_range_loop)]

pub mod criteria;
pub mod error;
pub mod experiments;
pub mod hv;
pub mod linalg;
pub mod montecarlo;
pub mod optimizer;
pub mod quantum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Complex64 = num_complex::Complex<f64>;
pub type Direction = quantum::Direction<f64>;
pub type TwoQubitState = quantum::TwoQubitState<f64>;
pub type CorrelationTensor = quantum::CorrelationTensor<f64>;
pub type ChshConfig = criteria::ChshConfig<f64>;
pub type CriterionVerdict = criteria::CriterionVerdict<f64>;
pub type SeparabilityVerdict = criteria::SeparabilityVerdict<f64>;
pub type SearchResult = optimizer::SearchResult<f64>;
pub type HiddenVariable = hv::HiddenVariable<f64>;

pub type Direction32 = quantum::Direction<f32>;
pub type TwoQubitState32 = quantum::TwoQubitState<f32>;
pub type ChshConfig32 = criteria::ChshConfig<f32>;
