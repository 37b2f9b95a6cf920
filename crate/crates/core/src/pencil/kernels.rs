//! Kernel identities for `Λ` and `Z₁`.

use crate::linalg;
use crate::linop::{CMat, LinOp};
use crate::operator_core::{accretivity_margin, sector_test, Sector, ANGLE_TOL, MARGIN_RTOL, NULL_RTOL};
use crate::pencil::{Convention, Factorization, PencilSpec};
use crate::report::ConditionReport;

fn stacked(top: &LinOp, bottom: &LinOp) -> CMat {
    let n = top.dim();
    let mut m = CMat::zeros(2 * n, n);
    m.view_mut((0, 0), (n, n)).copy_from(top.matrix());
    m.view_mut((n, 0), (n, n)).copy_from(bottom.matrix());
    m
}

fn sector_holds(a: &LinOp, theta: f64) -> bool {
    Sector::at_origin(theta).map(|s| sector_test(a, &s).pass).unwrap_or(false)
}

/// `N(Λ) ⊂ N(B²) ∩ N(C*)`. Margin is `ANGLE_TOL` minus the containment gap.
pub fn kernel_inclusion_lambda(p: &PencilSpec, theta: f64) -> ConditionReport {
    let b2 = p.b.square();
    let lambda = &b2 + &p.c;
    let hypothesis = theta < std::f64::consts::FRAC_PI_2
        && sector_holds(&p.c, theta)
        && accretivity_margin(&b2) >= -MARGIN_RTOL * b2.norm().max(1.0);
    let kernel = linalg::null_space(&lambda, NULL_RTOL);
    let joint = linalg::null_space(&stacked(&b2, &p.c.adjoint()), NULL_RTOL);
    let gap = linalg::containment_gap(&kernel, &joint);
    let mut r = ConditionReport::exact("kernel_lambda", ANGLE_TOL - gap, 0.0)
        .with_param("theta", theta)
        .with_param("kernel_dim", kernel.ncols() as f64)
        .with_param("joint_kernel_dim", joint.ncols() as f64)
        .with_param("gap", gap)
        .with_hypothesis(hypothesis);
    if !hypothesis {
        r = r.with_note("hypothesis unmet: C must be theta-sectorial and B^2 accretive");
    }
    r
}

/// `N(Z₁) = N(B) ∩ N(Λ^{1/2})`. Margin is `ANGLE_TOL` minus the subspace gap.
pub fn kernel_identity_z1(f: &Factorization, p: &PencilSpec, theta: f64) -> ConditionReport {
    let hypothesis =
        theta < std::f64::consts::FRAC_PI_2 && f.convention == Convention::RealRoot && sector_holds(&p.b, theta);
    let kernel = linalg::null_space(&f.z1, NULL_RTOL);
    let joint = linalg::null_space(&stacked(&p.b, &f.root), NULL_RTOL);
    let gap = linalg::subspace_gap(&kernel, &joint);
    let mut r = ConditionReport::exact("kernel_z1", ANGLE_TOL - gap, 0.0)
        .with_param("theta", theta)
        .with_param("kernel_dim", kernel.ncols() as f64)
        .with_param("joint_kernel_dim", joint.ncols() as f64)
        .with_param("gap", gap)
        .with_hypothesis(hypothesis);
    if !hypothesis {
        r = r.with_note("hypothesis unmet: needs the real-root convention and B theta-sectorial");
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linop::{c64, real};
    use crate::pencil::factorize;

    #[test]
    fn diagonal_kernel_inclusion() {
        let p = PencilSpec::new(LinOp::from_real_diagonal(&[0.0, 1.0]), LinOp::from_real_diagonal(&[0.0, 1.0])).unwrap();
        let r = kernel_inclusion_lambda(&p, 0.0);
        assert!(r.pass && r.hypothesis_met);
        assert_eq!(r.parameters["kernel_dim"], 1.0);
    }

    #[test]
    fn invertible_lambda_is_vacuous() {
        let p = PencilSpec::new(LinOp::identity(3), LinOp::identity(3)).unwrap();
        let r = kernel_inclusion_lambda(&p, 0.3);
        assert!(r.pass);
        assert_eq!(r.parameters["kernel_dim"], 0.0);
    }

    #[test]
    fn shared_kernel_fixture() {
        let mut rng = fixtures::rng(3);
        let u = fixtures::unitary(4, &mut rng);
        let conj = |d: &[f64]| LinOp::new(&u * LinOp::from_real_diagonal(d).matrix() * u.adjoint()).unwrap();
        let b = conj(&[0.0, 1.0, 2.0, 0.5]);
        let c = LinOp::new(&u * LinOp::from_diagonal(&[real(0.0), c64(1.0, 0.5), real(2.0), c64(1.0, -0.2)]).matrix() * u.adjoint())
            .unwrap();
        let p = PencilSpec::new(b, c).unwrap();
        let r = kernel_inclusion_lambda(&p, 0.5);
        assert!(r.pass && r.hypothesis_met, "{r:?}");
        assert_eq!(r.parameters["kernel_dim"], 1.0);
        let f = factorize(&p, crate::pencil::Convention::RealRoot).unwrap();
        let z = kernel_identity_z1(&f, &p, 0.5);
        assert!(z.pass, "{z:?}");
        assert_eq!(z.parameters["kernel_dim"], 1.0);
    }

    #[test]
    fn z1_kernel_invertible_case() {
        let p = PencilSpec::new(LinOp::from_real_diagonal(&[1.0, 2.0]), LinOp::from_real_diagonal(&[3.0, 5.0])).unwrap();
        let f = factorize(&p, crate::pencil::Convention::RealRoot).unwrap();
        let r = kernel_identity_z1(&f, &p, 0.0);
        assert!(r.pass && r.hypothesis_met);
        assert_eq!(r.parameters["kernel_dim"], 0.0);
    }

    #[test]
    fn z1_kernel_diagonal() {
        // Λ = B² = diag(0, 1), S = diag(0, 1), Z₁ = diag(0, 2)
        let b = LinOp::from_real_diagonal(&[0.0, 1.0]);
        let p = PencilSpec::new(b, LinOp::zeros(2)).unwrap();
        let f = factorize(&p, crate::pencil::Convention::RealRoot).unwrap();
        assert!((f.z1.matrix() - LinOp::from_real_diagonal(&[0.0, 2.0]).matrix()).norm() < 1e-14);
        let r = kernel_identity_z1(&f, &p, 0.0);
        assert!(r.pass && r.hypothesis_met);
        assert_eq!(r.parameters["kernel_dim"], 1.0);
    }
}
