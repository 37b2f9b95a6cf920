//! Quadratic pencils `Q(λ) = λ²I - 2λB - C`: condition checkers, the
//! operator `Λ = B² + C`, the linear factors `Z₁, Z₂`, factorization
//! residuals, kernel identities and pencil eigenstructure.

mod conditions;
mod factor;
mod kernels;
mod spectrum;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::{CMat, CVec, LinOp};

pub use conditions::{
    build_lambda, check_c1, check_c2, check_c3, check_c4_c5, default_t_grid, estimate_c2, C2Estimate,
    ConditionC1Params, ConditionC2Params, DEFAULT_C1_SAMPLES,
};
pub use factor::{
    factorize, factorize_branch, factorize_degenerate, ordered_residual, symmetrized_residual, Convention, Factorization, RootTarget,
};
pub use kernels::{kernel_identity_z1, kernel_inclusion_lambda};
pub use spectrum::{eigenvalue_localization_check, factor_shift_search, pencil_eigen, ShiftSearch};

/// The coefficient pair `(B, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PencilSpec {
    pub b: LinOp,
    pub c: LinOp,
}

impl PencilSpec {
    pub fn new(b: LinOp, c: LinOp) -> Result<Self> {
        c.check_dim(b.dim())?;
        Ok(PencilSpec { b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    /// `Q(λ)` as a matrix.
    pub fn matrix_at(&self, lambda: Complex64) -> CMat {
        let n = self.dim();
        let mut q = self.b.matrix() * (lambda * -2.0) - self.c.matrix();
        for i in 0..n {
            q[(i, i)] += lambda * lambda;
        }
        q
    }

    /// Natural magnitude of `Q(λ)`: `|λ|² + ‖B‖² + ‖C‖`.
    pub fn scale_at(&self, lambda: Complex64) -> f64 {
        let nb = self.b.norm();
        lambda.norm_sqr() + nb * nb + self.c.norm()
    }
}

/// `Q(λ)x = λ²x - 2λBx - Cx`.
pub fn evaluate_pencil(p: &PencilSpec, lambda: Complex64, x: &CVec) -> Result<CVec> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: x.len(),
        });
    }
    Ok(x * (lambda * lambda) - p.b.apply(x) * (lambda * 2.0) - p.c.apply(x))
}
