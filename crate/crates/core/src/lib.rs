//! Numerical solvers for the Boltzmann mean-field-game model of knowledge
//! growth: agents split time between producing and learning, and learn by
//! meeting agents with more knowledge.
//!
//! * [`td`]: forward-backward time-dependent solver and a Fisher-KPP simulator.
//! * [`bgp`]: balanced growth path fixed point, with and without diffusion.
//! * [`ktransform`]: the Pareto-tail transform `x~ = x^(-1/theta)`.
//! * [`analytic`]: closed-form reference solutions.
//! * [`diagnostics`]: production, growth-rate and tail fits, degeneracy.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod analytic;
pub mod bgp;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod ktransform;
pub mod learning;
pub mod linalg;
pub mod maximizer;
pub mod profile;
pub mod td;

pub use error::{Error, Result};
pub use grid::{cumulative_trapezoid, tail_trapezoid, trapezoid, UniformGrid};
pub use learning::LearningFunction;
pub use maximizer::{find_x0, optimal_control, policy_from_b, ControlCase, ThresholdPoint};
pub use profile::{b_functional, cdf_from_density, CdfProfile, DensityProfile, PolicyProfile, ValueProfile};
