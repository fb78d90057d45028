//! Measurement-based linear optics on a macronode lattice.
//!
//! Conventions: quadratures are ordered `(x_1, ..., x_n, p_1, ..., p_n)`,
//! `hbar = 1` so the vacuum covariance is `I / 2`, and
//! `x = (a + a^dagger) / sqrt(2)`. A passive operation `a -> U a` acts on
//! phase space as `[[Re U, -Im U], [Im U, Re U]]`; for photons the same `U`
//! maps input mode `j` to output mode `i` with amplitude `U[(i, j)]`.
//!
//! - [`gaussian`]: Gaussian states, homodyne conditioning, teleportation and
//!   channel extraction.
//! - [`compiler`]: unitaries to meshes of `V(theta, phi)` gates to macronode
//!   schedules, and their noisy evaluation.
//! - [`resources`]: squeezing and time budgets for BosonSampling.
//! - [`sampler`]: permanents, exact output distributions and lossy sampling.

// `!(x <= tol)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod linalg;
pub mod resources;
pub mod sampler;

pub use error::{Error, Result};
pub use linalg::{CMatrix, RMatrix};
