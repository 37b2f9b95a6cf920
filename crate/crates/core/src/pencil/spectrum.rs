//! Pencil eigenstructure through the companion linearization, eigenvalue
//! localization, and the shifted-sector search for the factors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{real, CMat, CVec, LinOp};
use crate::operator_core::{accretivity_margin, sector_test, Sector, MARGIN_RTOL};
use crate::pencil::{Factorization, PencilSpec};
use crate::report::ConditionReport;

const SHIFT_TOL: f64 = 1e-6;

/// Eigenpairs of `Q`, from the companion matrix `[[0, I], [C, 2B]]`. The
/// eigenvector is the (normalised) upper half of the companion vector.
pub fn pencil_eigen(p: &PencilSpec) -> Result<Vec<(Complex64, CVec)>> {
    let n = p.dim();
    let mut comp = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        comp[(i, n + i)] = real(1.0);
    }
    comp.view_mut((n, 0), (n, n)).copy_from(p.c.matrix());
    comp.view_mut((n, n), (n, n)).copy_from(&(p.b.matrix() * real(2.0)));
    let pairs = linalg::eigenpairs(&comp)?;
    pairs
        .into_iter()
        .map(|(lambda, w)| {
            let top = w.rows(0, n).into_owned();
            let bottom = w.rows(n, n).into_owned();
            // for |λ| > 1 the lower half λv carries more digits
            let mut v = if lambda.norm() > 1.0 { bottom / lambda } else { top };
            let nv = v.norm();
            if !(nv > 0.0) {
                return Err(Error::EigenFailure(format!("degenerate companion eigenvector at {lambda}")));
            }
            v /= real(nv);
            Ok((lambda, v))
        })
        .collect()
}

/// For every eigenpair `(λ = a + ib, v)`:
/// `2(a - |b|)·Re⟨Bv, v⟩ ≤ a² - b²`. Margin is the smallest slack
/// relative to `|λ|² + ‖B‖|λ| + ‖C‖`.
pub fn eigenvalue_localization_check(p: &PencilSpec) -> Result<ConditionReport> {
    let nb = p.b.norm();
    let nc = p.c.norm();
    let sector = Sector::at_origin(std::f64::consts::FRAC_PI_4)?;
    let hypothesis = sector_test(&p.b, &sector).pass && accretivity_margin(&p.c) >= -MARGIN_RTOL * nc.max(1.0);
    let pairs = pencil_eigen(p)?;
    let mut worst = f64::INFINITY;
    let mut worst_residual: f64 = 0.0;
    for (lambda, v) in &pairs {
        let (a, b) = (lambda.re, lambda.im);
        let re_b = p.b.quadratic_form(v).re;
        let slack = a * a - b * b - 2.0 * (a - b.abs()) * re_b;
        let scale = lambda.norm_sqr() + nb * lambda.norm() + nc;
        worst = worst.min(slack / scale.max(f64::MIN_POSITIVE));
        let q = p.matrix_at(*lambda) * v;
        worst_residual = worst_residual.max(q.norm() / scale.max(f64::MIN_POSITIVE));
    }
    let mut r = ConditionReport::exact("eigen_localization", worst, 1e-9)
        .with_param("pairs", pairs.len() as f64)
        .with_param("max_relative_residual", worst_residual)
        .with_hypothesis(hypothesis);
    if !hypothesis {
        r = r.with_note("hypothesis unmet: B must be pi/4-sectorial and C accretive");
    }
    Ok(r)
}

/// Smallest shifts making the factors sectorial of half-angle `ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSearch {
    /// `W(Z₁ + r₁) ⊆ S̄(ψ)`.
    pub r1: f64,
    /// `W(-Z₂ + r₂) ⊆ S̄(ψ)`.
    pub r2: f64,
    pub psi: f64,
}

fn min_shift(a: &LinOp, psi: f64, limit: f64) -> Result<f64> {
    let passes = |r: f64| -> Result<bool> { Ok(sector_test(a, &Sector::new(real(-r), psi)?).pass) };
    if passes(0.0)? {
        return Ok(0.0);
    }
    if !passes(limit)? {
        return Err(Error::SearchFailed { limit });
    }
    let (mut lo, mut hi) = (0.0, limit);
    while hi - lo > SHIFT_TOL {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Bisection for the smallest `r₁, r₂ ≥ 0` with `Z₁ + r₁` and `-Z₂ + r₂`
/// sectorial of half-angle `π/4 + ε`.
pub fn factor_shift_search(f: &Factorization, epsilon: f64) -> Result<ShiftSearch> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let psi = (std::f64::consts::FRAC_PI_4 + epsilon).min(std::f64::consts::FRAC_PI_2);
    let bn = (&f.z1 + &f.z2).norm() * 0.5;
    let limit = 10.0 * (bn + f.root.norm());
    let r1 = min_shift(&f.z1, psi, limit)?;
    let r2 = min_shift(&-&f.z2, psi, limit)?;
    Ok(ShiftSearch { r1, r2, psi })
}
