//! Principal square roots: Schur recurrence (default) and scaled
//! Denman–Beavers iteration (cross-check).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{real, CMat, LinOp};

/// Eigenvalues with `|λ| ≤ ZERO_RTOL·‖A‖_F` are treated as zero.
const ZERO_RTOL: f64 = 1e-14;

const DB_MAX_ITER: usize = 100;
const DB_TOL: f64 = 1e-14;

fn on_closed_negative_axis(lambda: Complex64, scale: f64) -> bool {
    let tiny = ZERO_RTOL * scale;
    lambda.norm() <= tiny || (lambda.re < 0.0 && lambda.im.abs() <= tiny)
}

/// Principal square root through the complex Schur form.
///
/// Fails with [`Error::NegativeRealEigenvalue`] when an eigenvalue lies on
/// `(-∞, 0]`. Every eigenvalue of the result has positive real part.
pub fn principal_sqrt(a: &LinOp) -> Result<LinOp> {
    schur_root(a, false)
}

/// Like [`principal_sqrt`], but a semisimple zero eigenvalue is accepted
/// and mapped to zero, so the root shares the kernel of `A`. Defective
/// zero eigenvalues and the open negative axis are still rejected.
pub fn sqrt_with_kernel(a: &LinOp) -> Result<LinOp> {
    schur_root(a, true)
}

fn schur_root(a: &LinOp, allow_zero: bool) -> Result<LinOp> {
    let scale = a.norm();
    let tiny = ZERO_RTOL * scale;
    let (q, t) = linalg::schur(a)?;
    let n = t.nrows();
    let mut zero = vec![false; n];
    for i in 0..n {
        let lambda = t[(i, i)];
        if allow_zero && lambda.norm() <= tiny.max(f64::MIN_POSITIVE) {
            zero[i] = true;
        } else if on_closed_negative_axis(lambda, scale) {
            return Err(Error::NegativeRealEigenvalue(lambda));
        }
    }
    let mut r = CMat::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = if zero[j] { real(0.0) } else { t[(j, j)].sqrt() };
        for i in (0..j).rev() {
            let mut acc = t[(i, j)];
            for k in (i + 1)..j {
                acc -= r[(i, k)] * r[(k, j)];
            }
            if zero[i] && zero[j] {
                // coupling inside the zero block means a Jordan chain
                if acc.norm() > 1e3 * tiny.max(f64::MIN_POSITIVE) {
                    return Err(Error::NegativeRealEigenvalue(real(0.0)));
                }
                r[(i, j)] = real(0.0);
            } else {
                r[(i, j)] = acc / (r[(i, i)] + r[(j, j)]);
            }
        }
    }
    LinOp::new(&q * r * q.adjoint())
}

/// Principal square root by the scaled product-form Denman–Beavers
/// iteration `M ← (I + (μ²M + μ⁻²M⁻¹)/2)/2`, `Y ← μY(I + μ⁻²M⁻¹)/2`.
pub fn sqrt_denman_beavers(a: &LinOp) -> Result<LinOp> {
    let n = a.dim();
    let scale = a.norm();
    for lambda in linalg::eigenvalues(a)? {
        if on_closed_negative_axis(lambda, scale) {
            return Err(Error::NegativeRealEigenvalue(lambda));
        }
    }
    let eye = CMat::identity(n, n);
    let mut m = a.matrix().clone();
    let mut y = a.matrix().clone();
    let mut scaling = true;
    let mut residual = f64::INFINITY;
    for iteration in 1..=DB_MAX_ITER {
        let m_inv = linalg::solve(&m, &eye)?;
        let mu = if scaling {
            (-linalg::log_abs_det(&m) / (2.0 * n as f64)).exp()
        } else {
            1.0
        };
        let mu2 = mu * mu;
        y = &y * (&eye + &m_inv * real(1.0 / mu2)) * real(0.5 * mu);
        m = (&eye + (&m * real(mu2) + &m_inv * real(1.0 / mu2)) * real(0.5)) * real(0.5);
        residual = (&m - &eye).norm();
        if residual < 1e-2 {
            scaling = false;
        }
        if residual <= DB_TOL * (n as f64).sqrt() {
            return LinOp::new(y);
        }
        if !residual.is_finite() {
            return Err(Error::NonConvergence { iterations: iteration, residual });
        }
    }
    Err(Error::NonConvergence {
        iterations: DB_MAX_ITER,
        residual,
    })
}

/// `‖S² - A‖ / ‖A‖`.
pub fn root_residual(s: &LinOp, a: &LinOp) -> f64 {
    let r = linalg::spectral_norm(&(s.square().into_matrix() - a.matrix()));
    r / a.norm().max(f64::MIN_POSITIVE)
}
