//! Stabilization laboratory for the 1D wave equation on a periodically
//! moving domain.
//!
//! The pipeline: a 1-periodic boundary trajectory `a(t)` induces the
//! circle lift `F = (I + a) ∘ (I - a)⁻¹`; its rotation number and a
//! conjugacy `H` (with `H ∘ F = H + ρ`) reduce the moving-domain wave
//! system to a fixed damped string of length `ρ/2`. The boundary feedback
//! synthesized from `H'` yields exponential energy decay (extinction in
//! finite time for the perfectly absorbing gain), which the exact
//! characteristics solvers here measure against the predicted rates.
//!
//! Modules follow that pipeline:
//!
//! - [`profiles`]: boundary trajectories `a(t)` and their hypotheses;
//! - [`circlemap`]: lifts, rotation numbers, conjugacies;
//! - [`geometry`]: the spacetime transformation, its conformal factor,
//!   and the moving-point geometry;
//! - [`control`]: feedback gain, reflection coefficient, extinction time,
//!   decay-rate predictions;
//! - [`dalembert`]: characteristics solvers and the finite-difference
//!   oracle;
//! - [`analysis`]: decay fits, energy equivalence, extinction detection.

pub mod analysis;
pub mod circlemap;
pub mod control;
pub mod dalembert;
pub mod geometry;
pub mod numeric;
pub mod profiles;
