//! Fractional powers of accretive operators through the Balakrishnan
//! integral `T^α = (sin πα / π) ∫₀^∞ λ^{α-1} T (λ + T)^{-1} dλ`.
//!
//! With `λ = t/(1-t)` the integrand becomes
//! `t^{α-1} (1-t)^{-α} G(t)` on `(0, 1)` with `G(t) = T (t I + (1-t) T)^{-1}`.
//! The linear interpolant `(1-t)I + tT` of `G` is integrated in closed form
//! against the weight, giving `(1-α)I + αT`; only the remainder, which
//! vanishes at both ends, goes through the quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;
use crate::linop::{real, CMat, LinOp};
use crate::matfun::QuadratureRule;
use crate::operator_core::accretivity_margin;

pub fn balakrishnan_power(t: &LinOp, alpha: f64, rule: &QuadratureRule) -> Result<LinOp> {
    balakrishnan_power_with(t, alpha, rule, Exec::default())
}

/// Node evaluations run under `exec`; the weighted sum is always taken in
/// node order.
pub fn balakrishnan_power_with(t: &LinOp, alpha: f64, rule: &QuadratureRule, exec: Exec) -> Result<LinOp> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("fractional exponent {alpha} outside (0, 1)")));
    }
    rule.validate()?;
    let scale = t.norm();
    if accretivity_margin(t) < -1e-10 * scale {
        return Err(Error::InvalidArgument("fractional power needs an accretive operator".into()));
    }
    let n = t.dim();
    let terms = exec.try_map(rule.len(), |k| {
        let s = rule.nodes[k];
        let one_minus = 1.0 - s;
        let mut shifted = t.matrix() * real(one_minus);
        for i in 0..n {
            shifted[(i, i)] += real(s);
        }
        let smin = linalg::min_singular_value(&shifted);
        if smin <= 1e-13 * scale.max(1.0) {
            return Err(Error::SingularResolvent { sigma_min: smin });
        }
        let mut resolved = linalg::solve(&shifted, t.matrix())
            .map_err(|_| Error::SingularResolvent { sigma_min: smin })?;
        resolved -= t.matrix() * real(s);
        for i in 0..n {
            resolved[(i, i)] -= real(one_minus);
        }
        let weight = rule.weights[k] * s.powf(alpha - 1.0) * one_minus.powf(-alpha);
        Ok(resolved * real(weight))
    })?;
    let mut acc = CMat::zeros(n, n);
    for term in &terms {
        acc += term;
    }
    let mut out = acc * real((PI * alpha).sin() / PI) + t.matrix() * real(alpha);
    for i in 0..n {
        out[(i, i)] += real(1.0 - alpha);
    }
    LinOp::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let rule = QuadratureRule::balakrishnan_default();
        let p = balakrishnan_power(&LinOp::identity(2), 0.5, &rule).unwrap();
        assert!((p.matrix() - LinOp::identity(2).matrix()).norm() < 1e-14);
        let p = balakrishnan_power(&LinOp::from_real_diagonal(&[4.0, 9.0]), 0.5, &rule).unwrap();
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-8 && (p[(1, 1)].re - 3.0).abs() < 1e-8);
        let p = balakrishnan_power(&LinOp::from_real_diagonal(&[16.0]), 0.25, &rule).unwrap();
        assert!((p[(0, 0)].re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn singular_operator_is_rejected() {
        let rule = QuadratureRule::balakrishnan_default();
        let r = balakrishnan_power(&LinOp::from_real_diagonal(&[0.0, 1.0]), 0.5, &rule);
        assert!(matches!(r, Err(Error::SingularResolvent { .. })));
    }

    #[test]
    fn rejects_exponent_out_of_range() {
        let rule = QuadratureRule::balakrishnan_default();
        assert!(balakrishnan_power(&LinOp::identity(1), 1.0, &rule).is_err());
        assert!(balakrishnan_power(&LinOp::identity(1), 0.0, &rule).is_err());
    }

    #[test]
    fn execution_modes_agree_bitwise() {
        let rule = QuadratureRule::balakrishnan_default();
        let t = LinOp::from_real_rows(&[vec![2.0, 1.0], vec![-1.0, 3.0]]).unwrap();
        let a = balakrishnan_power_with(&t, 0.3, &rule, Exec::Sequential).unwrap();
        let b = balakrishnan_power_with(&t, 0.3, &rule, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
