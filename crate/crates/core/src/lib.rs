//! Stackelberg persuasion with trust constraints.
//!
//! A sender observes a uniformly random symbol, commits to a signaling
//! strategy and a receiver decodes the signal to maximize correct recovery.
//! The crate computes the sender's game value and informativeness through
//! exact linear programs, builds near-optimal sender strategies, and checks
//! the results against graph closed forms and brute-force oracles.
//!
//! Every algorithm is generic over [`Scalar`]; use the `Rational` aliases for
//! exact answers.

pub mod equilibrium;
pub mod error;
pub mod format;
pub mod game;
pub mod graph;
pub mod lp;
pub mod oracle;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type UtilityMatrixQ = game::UtilityMatrix<Rational>;
pub type SenderStrategyQ = game::SenderStrategy<Rational>;
pub type ReceiverStrategyQ = game::ReceiverStrategy<Rational>;
pub type RecoveryKernelQ = game::RecoveryKernel<Rational>;
pub type LinearProgramQ = lp::LinearProgram<Rational>;
pub type LpCertificateQ = lp::LpCertificate<Rational>;
pub type EquilibriumReportQ = equilibrium::EquilibriumReport<Rational>;

pub type UtilityMatrixF64 = game::UtilityMatrix<f64>;
pub type SenderStrategyF64 = game::SenderStrategy<f64>;
pub type RecoveryKernelF64 = game::RecoveryKernel<f64>;
pub type LinearProgramF64 = lp::LinearProgram<f64>;
pub type EquilibriumReportF64 = equilibrium::EquilibriumReport<f64>;
