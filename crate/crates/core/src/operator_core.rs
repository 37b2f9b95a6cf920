//! Accretivity, numerical range and sector certification for dense operators.
//!
//! In finite dimension every accretive operator is m-accretive (the range
//! condition on `λ + A` holds automatically), so "m-accretive" checks reduce
//! to the sign of the smallest eigenvalue of the Hermitian part.
//!
//! The numerical range `W(A)` is represented through its support function
//! `h(θ) = max Re(e^{-iθ} W(A))`, sampled on a uniform angle grid. The
//! intersection of the supporting half-planes is a certified outer
//! approximation; the witness points `⟨A x_θ, x_θ⟩` are inner points on the
//! boundary.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;
use crate::linop::{c64, real, CVec, LinOp};

pub const DEFAULT_RANGE_SAMPLES: usize = 720;

/// Relative tolerance applied to pass/fail margins (scaled by `‖A‖`).
pub const MARGIN_RTOL: f64 = 1e-10;

/// Singular values below `NULL_RTOL · ‖A‖` count as zero.
pub const NULL_RTOL: f64 = 1e-10;

/// Principal-angle tolerance for subspace comparisons.
pub const ANGLE_TOL: f64 = 1e-8;

/// Outcome of a certification check. `margin >= 0` exactly when `pass`
/// for checks with a zero threshold; tolerance-based checks keep the sign
/// of the raw margin and record the tolerance separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub margin: f64,
}

/// Closed sector `{ z : |arg(z - vertex)| ≤ half_angle }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub vertex: Complex64,
    pub half_angle: f64,
}

impl Sector {
    pub fn new(vertex: Complex64, half_angle: f64) -> Result<Self> {
        if !(vertex.re.is_finite() && vertex.im.is_finite()) {
            return Err(Error::InvalidArgument("sector vertex must be finite".into()));
        }
        if !(0.0..=FRAC_PI_2).contains(&half_angle) {
            return Err(Error::InvalidArgument(format!(
                "sector half-angle {half_angle} outside [0, π/2]"
            )));
        }
        Ok(Sector { vertex, half_angle })
    }

    pub fn at_origin(half_angle: f64) -> Result<Self> {
        Self::new(c64(0.0, 0.0), half_angle)
    }

    /// Distance from `z` to the sector.
    pub fn distance(&self, z: Complex64) -> f64 {
        let w = z - self.vertex;
        let arg = w.arg().abs();
        if arg <= self.half_angle {
            0.0
        } else if arg - self.half_angle >= FRAC_PI_2 {
            w.norm()
        } else {
            w.norm() * (arg - self.half_angle).sin()
        }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }
}

/// Splits `A` into its Hermitian and skew-Hermitian parts, `A = H + K`.
pub fn hermitian_split(a: &LinOp) -> (LinOp, LinOp) {
    (
        LinOp::from_computed(linalg::hermitian_part(a)),
        LinOp::from_computed(linalg::skew_part(a)),
    )
}

/// Smallest eigenvalue of the Hermitian part: `min Re⟨Ax, x⟩` over unit `x`.
/// Non-negative exactly when `A` is (m-)accretive.
pub fn accretivity_margin(a: &LinOp) -> f64 {
    linalg::hermitian_min_eigenvalue(a)
}

fn margin_tol(a: &LinOp) -> f64 {
    MARGIN_RTOL * a.norm().max(f64::MIN_POSITIVE)
}

pub fn is_accretive(a: &LinOp) -> Verdict {
    let margin = accretivity_margin(a);
    Verdict {
        pass: margin >= -margin_tol(a),
        margin,
    }
}

/// Support-function samples of the numerical range.
#[derive(Clone, Debug)]
pub struct NumericalRangeSample {
    pub angles: Vec<f64>,
    pub support_values: Vec<f64>,
    pub boundary_points: Vec<Complex64>,
    pub witnesses: Vec<CVec>,
}

impl NumericalRangeSample {
    /// Largest amount by which `z` violates a supporting half-plane;
    /// non-positive when `z` lies in the outer approximation.
    pub fn outer_violation(&self, z: Complex64) -> f64 {
        self.angles
            .iter()
            .zip(&self.support_values)
            .map(|(&theta, &h)| (c64(0.0, -theta).exp() * z).re - h)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.outer_violation(z) <= tol
    }

    /// Worst violation of any supporting half-plane by any boundary point.
    /// Zero (up to rounding) when the boundary points are in convex position.
    pub fn convexity_defect(&self) -> f64 {
        self.boundary_points
            .iter()
            .map(|&z| self.outer_violation(z))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|⟨A x_θ, x_θ⟩ - z_θ|` and largest `|‖x_θ‖ - 1|` over the witnesses.
    pub fn witness_residual(&self, a: &LinOp) -> (f64, f64) {
        self.witnesses
            .iter()
            .zip(&self.boundary_points)
            .fold((0.0_f64, 0.0_f64), |(r, u), (x, &z)| {
                (r.max((a.quadratic_form(x) - z).norm()), u.max((x.norm() - 1.0).abs()))
            })
    }
}

pub fn numerical_range(a: &LinOp, m: usize) -> Result<NumericalRangeSample> {
    numerical_range_with(a, m, Exec::default())
}

/// Samples the support function of `W(A)` at `θ_k = 2πk/m`.
pub fn numerical_range_with(a: &LinOp, m: usize, exec: Exec) -> Result<NumericalRangeSample> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("numerical range needs m >= 3, got {m}")));
    }
    let samples = exec.try_map(m, |k| {
        let theta = 2.0 * PI * k as f64 / m as f64;
        let rotated = a.matrix() * c64(0.0, -theta).exp();
        let (values, vectors) = linalg::hermitian_eigen(&linalg::hermitian_part(&rotated));
        let top = values.len() - 1;
        let h = values[top];
        if !h.is_finite() {
            return Err(Error::EigenFailure(format!("non-finite support value at θ = {theta}")));
        }
        let x: CVec = vectors.column(top).into_owned();
        let z = a.quadratic_form(&x);
        Ok((theta, h, z, x))
    })?;
    let mut out = NumericalRangeSample {
        angles: Vec::with_capacity(m),
        support_values: Vec::with_capacity(m),
        boundary_points: Vec::with_capacity(m),
        witnesses: Vec::with_capacity(m),
    };
    for (theta, h, z, x) in samples {
        out.angles.push(theta);
        out.support_values.push(h);
        out.boundary_points.push(z);
        out.witnesses.push(x);
    }
    Ok(out)
}

/// Tests `W(A) ⊆ S̄(ω)` with vertex `s.vertex` through accretivity of the
/// two rotations `e^{±iφ}(A - vertex)`, `φ = π/2 - ω`. The margin is the
/// smaller of the two accretivity margins.
///
/// At `ω = 0` the two rotations only force `Im⟨Ax, x⟩ = 0`, so the plain
/// accretivity margin of `A - vertex` is folded into the minimum as well.
pub fn sector_test(a: &LinOp, s: &Sector) -> Verdict {
    let shifted = a.shift(-s.vertex);
    let phi = FRAC_PI_2 - s.half_angle;
    let plus = accretivity_margin(&shifted.scale(c64(0.0, phi).exp()));
    let minus = accretivity_margin(&shifted.scale(c64(0.0, -phi).exp()));
    let mut margin = plus.min(minus);
    if s.half_angle == 0.0 {
        margin = margin.min(accretivity_margin(&shifted));
    }
    Verdict {
        pass: margin >= -margin_tol(&shifted),
        margin,
    }
}

/// `(λI - A)^{-1}`.
pub fn resolvent(a: &LinOp, lambda: Complex64) -> Result<LinOp> {
    let m = a.scale(real(-1.0)).shift(lambda);
    let s = linalg::singular_values(&m);
    let smax = s[0];
    let smin = *s.last().expect("non-empty operator");
    if smin <= 1e-13 * smax.max(1.0) {
        return Err(Error::SingularResolvent { sigma_min: smin });
    }
    let inv = linalg::solve(&m, &nalgebra::DMatrix::identity(a.dim(), a.dim()))
        .map_err(|_| Error::SingularResolvent { sigma_min: smin })?;
    Ok(LinOp::from_computed(inv))
}

/// Checks that every eigenvalue of `A` lies in the support-function outer
/// approximation of `W(A)`. Margin is minus the worst violation.
pub fn spectral_inclusion_check(a: &LinOp, m: usize) -> Result<(Verdict, f64)> {
    let range = numerical_range(a, m)?;
    let worst = linalg::eigenvalues(a)?
        .into_iter()
        .map(|mu| range.outer_violation(mu))
        .fold(f64::NEG_INFINITY, f64::max);
    let tol = margin_tol(a) + 1e-14;
    Ok((
        Verdict {
            pass: worst <= tol,
            margin: -worst,
        },
        worst,
    ))
}

/// Compares the numerical null spaces of `A` and `A*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    pub pass: bool,
    /// `ANGLE_TOL` minus the subspace gap.
    pub margin: f64,
    pub kernel_dim: usize,
    pub adjoint_kernel_dim: usize,
    pub gap: f64,
}

pub fn kernel_equality_check(a: &LinOp) -> KernelComparison {
    let n_a = linalg::null_space(a, NULL_RTOL);
    let n_adj = linalg::null_space(&a.adjoint(), NULL_RTOL);
    let gap = linalg::subspace_gap(&n_a, &n_adj);
    KernelComparison {
        pass: gap <= ANGLE_TOL,
        margin: ANGLE_TOL - gap,
        kernel_dim: n_a.ncols(),
        adjoint_kernel_dim: n_adj.ncols(),
        gap,
    }
}
