//! q-deformed calculus and the scale/shift structure of `dy/dx = y^q`.
//!
//! * [`qcore`]: `ln_q`, `exp_q` and their domains.
//! * [`qalgebra`]: q-product, q-ratio, scale drift of sequential shifts.
//! * [`dynamics`]: solutions of `dy/dx = ±y^q`, rescale factors, RK4
//!   cross-checks, shift/rescaling equivalence.
//! * [`combinatorics`]: q-factorials, q-Stirling, q-multinomials, Tsallis
//!   entropy.
//! * [`qgaussian`]: q-Gaussian densities, normalization and the q-log
//!   likelihood of a location parameter.
//! * [`canonical`]: q-exponential distributions and their canonical q-log
//!   form.
//! * [`verify`]: seeded verification suites; [`cli`]: the command-line
//!   driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod cli;
pub mod combinatorics;
pub mod dynamics;
pub mod error;
pub mod figure;
pub mod qalgebra;
pub mod qcore;
pub mod qgaussian;
pub mod quadrature;
pub mod verify;

pub use error::{QError, Result};
pub use qcore::{q_exp, q_log, DomainMode, EntropicIndex};
