//! Numerics for time-fractional problems `D_t^δ u - p u_xx + q u_x + r u = f` on an
//! interval, with a Caputo derivative of order `δ ∈ (0,1) ∪ (1,2)`.
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! * [`specialfn`]: Gamma, Mittag-Leffler `E_α(z)` and the time derivatives of
//!   `E_δ(-λ t^δ)`;
//! * [`caputo`]: the Caputo derivative by singularity-aware quadrature and by the
//!   discrete L1/L2 operators on time meshes;
//! * [`exactsol`]: eigenmode solutions `Σ c_k E_δ(-k² t^δ) sin(kx)` on `(0, π)`;
//! * [`fdsolver`]: an implicit finite-difference solver and a convergence harness;
//! * [`regdiag`]: diagnostics showing when a smooth-in-time solution is possible at all.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod caputo;
mod error;
pub mod exactsol;
pub mod expr;
pub mod fdsolver;
pub mod fit;
mod gauss;
pub mod regdiag;
pub mod specialfn;
pub mod tridiag;

pub use error::{Error, Result};
pub use expr::Expr;
pub use specialfn::{FractionalOrder, SeriesEvalConfig};
