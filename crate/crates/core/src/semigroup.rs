//! Propagators `e^{-tT}` and checks of contraction, holomorphic-sector and
//! quasi-sectorial containment.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::RwLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linop::{c64, real, LinOp};
use crate::matfun::expm;
use crate::operator_core::{numerical_range_with, sector_test, Sector};
use crate::report::ConditionReport;

pub const DEFAULT_T_SAMPLES: [f64; 6] = [0.01, 0.1, 0.5, 1.0, 2.0, 10.0];

/// Distance kept from the sector boundary when sampling complex times.
pub const ANGLE_GUARD: f64 = 1e-3;

const CONTRACTION_TOL: f64 = 1e-12;
const HOLOMORPHIC_TOL: f64 = 1e-10;
const OMEGA_TOL: f64 = 1e-10;

/// `e^{-tT}` for `t ≥ 0`.
pub fn propagator(t_op: &LinOp, t: f64) -> Result<LinOp> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("propagator time must be >= 0, got {t}")));
    }
    expm(&t_op.scale(real(-t)))
}

/// Memoised `e^{sign·t·G}` keyed by the exact bit pattern of `t`.
///
/// Entries are never removed. Concurrent misses on the same `t` may both
/// compute; the values are identical, so whichever insert lands is kept.
#[derive(Debug)]
pub struct PropagatorCache {
    generator: LinOp,
    sign: f64,
    entries: RwLock<HashMap<u64, LinOp>>,
}

impl PropagatorCache {
    pub fn new(generator: LinOp, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidArgument(format!("cache sign must be +1 or -1, got {sign}")));
        }
        Ok(PropagatorCache {
            generator,
            sign,
            entries: RwLock::new(HashMap::new()),
        })
    }

    pub fn generator(&self) -> &LinOp {
        &self.generator
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, t: f64) -> Result<LinOp> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("propagator time must be >= 0, got {t}")));
        }
        let key = t.to_bits();
        if let Some(m) = self.entries.read().expect("cache lock poisoned").get(&key) {
            return Ok(m.clone());
        }
        let m = expm(&self.generator.scale(real(self.sign * t)))?;
        self.entries
            .write()
            .expect("cache lock poisoned")
            .insert(key, m.clone());
        Ok(m)
    }
}

/// `max_t ‖e^{-tT}‖` over `t_samples`.
pub fn contraction_check(t_op: &LinOp, t_samples: &[f64]) -> Result<f64> {
    let norms = Exec::default().try_map(t_samples.len(), |k| propagator(t_op, t_samples[k]).map(|p| p.norm()))?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `true` when the contraction bound `‖e^{-tT}‖ ≤ 1 + 1e-12` holds.
pub fn is_contraction(worst_norm: f64) -> bool {
    worst_norm <= 1.0 + CONTRACTION_TOL
}

/// Polar sample of complex times: radii times evenly spaced angles.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for PolarGrid {
    fn default() -> Self {
        PolarGrid {
            radii: vec![0.1, 1.0, 10.0],
            angles: 33,
        }
    }
}

/// `‖e^{-zT}‖ ≤ 1` for `|arg z| ≤ π/2 - ψ - guard`. Margin is
/// `1 - max ‖e^{-zT}‖`.
pub fn holomorphic_sector_check(t_op: &LinOp, psi: f64, grid: &PolarGrid) -> Result<ConditionReport> {
    let sector = Sector::at_origin(psi)?;
    let hypothesis = sector_test(t_op, &sector).pass;
    let opening = (FRAC_PI_2 - psi - ANGLE_GUARD).max(0.0);
    let na = grid.angles.max(1);
    let mut points = Vec::with_capacity(grid.radii.len() * na);
    for &r in &grid.radii {
        for k in 0..na {
            let theta = if na == 1 { 0.0 } else { -opening + 2.0 * opening * k as f64 / (na - 1) as f64 };
            points.push(Complex64::from_polar(r, theta));
        }
    }
    let norms = Exec::default().try_map(points.len(), |k| expm(&t_op.scale(-points[k])).map(|p| p.norm()))?;
    let worst = norms.iter().copied().fold(0.0, f64::max);
    let mut r = ConditionReport::exact("holomorphic_sector", 1.0 - worst, HOLOMORPHIC_TOL)
        .with_param("psi", psi)
        .with_param("opening", opening)
        .with_param("points", points.len() as f64)
        .with_param("worst_norm", worst)
        .with_hypothesis(hypothesis);
    if !hypothesis {
        r = r.with_note("hypothesis unmet: operator is not sectorial with the requested half-angle");
    }
    Ok(r)
}

/// How far `z` sits outside `Ω(ω) = {z : |Im √z| ≤ ½(1 - |z|)·tan ω}`.
/// At `ω = π/2` the set is the closed unit disc.
///
/// `|Im √z|` is the same for both roots, so the branch cut on the negative
/// axis does not affect the value.
pub fn omega_violation(z: Complex64, omega: f64) -> f64 {
    if omega >= FRAC_PI_2 {
        return z.norm() - 1.0;
    }
    let lhs = z.sqrt().im.abs();
    let rhs = 0.5 * (1.0 - z.norm()) * omega.tan();
    lhs - rhs
}

pub fn in_omega(z: Complex64, omega: f64, tol: f64) -> bool {
    omega_violation(z, omega) <= tol
}

/// `W(e^{-tT}) ⊆ Ω(ω)` on the sampled boundary of the numerical range for
/// every `t` in `t_samples`. Margin is minus the worst violation.
pub fn quasi_sectorial_check(t_op: &LinOp, omega: f64, t_samples: &[f64], m: usize) -> Result<ConditionReport> {
    let sector = Sector::at_origin(omega.min(FRAC_PI_2))?;
    let hypothesis = sector_test(t_op, &sector).pass;
    let mut worst = f64::NEG_INFINITY;
    for &t in t_samples {
        let e = propagator(t_op, t)?;
        let range = numerical_range_with(&e, m, Exec::default())?;
        for &z in &range.boundary_points {
            worst = worst.max(omega_violation(z, omega));
            if z.re < 0.0 && z.im.abs() < 1e-14 {
                // both sides of the cut
                worst = worst.max(omega_violation(c64(z.re, 0.0), omega));
                worst = worst.max(omega_violation(c64(z.re, -0.0), omega));
            }
        }
    }
    let mut r = ConditionReport::exact("quasi_sectorial", -worst, OMEGA_TOL)
        .with_param("omega", omega)
        .with_param("t_count", t_samples.len() as f64)
        .with_param("range_samples", m as f64)
        .with_hypothesis(hypothesis);
    if !hypothesis {
        r = r.with_note("hypothesis unmet: operator is not omega-sectorial");
    }
    Ok(r)
}
