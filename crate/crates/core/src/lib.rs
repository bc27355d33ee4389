//! Finite-model approximation of decentralized stochastic team problems.
//!
//! The pipeline: describe a sequential team problem ([`team::TeamProblem`]),
//! statically reduce it so that observations become independent standard
//! Gaussians with the observation densities absorbed into the cost
//! ([`team::static_reduce`]), discretize observations with uniform quantizers
//! carrying an overflow symbol and actions with finite grids
//! ([`quant`]), build the finite team model ([`finite::build_finite`]),
//! optimize the policy table by person-by-person best-response descent or
//! exhaustive search ([`solver`]), extend the finite policy back to the
//! continuous problem and certify it against closed-form evaluation, Monte
//! Carlo, and analytic baselines ([`evaluator`]).
//!
//! Problem instances live in [`problems`]; refinement-schedule experiments and
//! report emission in [`experiments`].

pub mod error;
pub mod evaluator;
pub mod experiments;
pub mod finite;
pub mod gauss;
pub mod problems;
pub mod quant;
pub mod solver;
pub mod team;

pub use error::{Error, Result};
