//! Effective commutative quantum mechanics on (1+1)-dimensional Moyal
//! space-time, `[t, x] = i theta`.
//!
//! States are represented by their coherent-state symbols `psi(x, t)`, and
//! operator products become Voros star products. The crate is organised
//! bottom-up:
//!
//! - [`fieldgrid`]: uniform grids, sampled fields, spectral derivatives, quadrature.
//! - [`star`]: the Voros/Moyal star-product engine and its plane-wave oracle.
//! - [`symbols`]: momentum symbols, slice algebra, induced inner product, densities.
//! - [`operators`]: deformed position/time operators, momenta, boosts, the map `M`.
//! - [`dynamics`]: free packets, the oscillator, stationary and time-dependent solvers.
//! - [`moments`]: expectations, uncertainty relations, variance matrices, Ehrenfest checks.
//! - [`cli`]: configuration-driven experiments and reports.
//!
//! Units have `hbar = 1`; coordinates are `x^0 = t`, `x^1 = x`.

// Negated comparisons also reject NaN; index loops mirror the expansion formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod fieldgrid;
pub mod moments;
pub mod operators;
pub mod star;
pub mod symbols;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use fieldgrid::{Axis, Field1D, Field2D, GridSpec};
pub use star::{Flavor, Method, StarKernel};
pub use symbols::SliceSymbol;
