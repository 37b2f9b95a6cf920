//! Factorization of quadratic operator pencils `Q(λ) = λ²I - 2λB - C` with
//! accretive coefficients into linear factors `Z₁,₂ = B ± (B² + C)^{1/2}`,
//! together with the certification layer (accretivity, numerical range,
//! sectors) and a solver for the boundary-value problem
//! `u'' - 2Bu' - Cu = f`, `u(0) = u₀`, `u(1) = u₁` built on the factors.
//!
//! All operators are dense complex matrices ([`LinOp`]). Data-parallel
//! loops go through [`exec::Exec`]; enable or disable rayon with the
//! `parallel` feature.

pub mod bvp;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod linop;
pub mod matfun;
pub mod operator_core;
pub mod pde_example;
pub mod pencil;
pub mod report;
pub mod sampling;
pub mod semigroup;

pub use error::{Error, Result};
pub use exec::Exec;
pub use linop::{c64, real, CMat, CVec, LinOp};
