use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use qpencil::fixtures;
use qpencil::matfun::{balakrishnan_power, expm, principal_sqrt, root_residual, sqrt_denman_beavers, QuadratureRule};
use qpencil::operator_core::{sector_test, Sector};
use qpencil::{linalg, real, LinOp};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn root_squares_back(seed in any::<u64>(), n in 1usize..24) {
        let mut rng = fixtures::rng(seed);
        let a = fixtures::accretive(n, 0.05, 3.0, 3.0, &mut rng);
        let s = principal_sqrt(&a).unwrap();
        prop_assert!(root_residual(&s, &a) <= 1e-10 * a.norm());
    }

    #[test]
    fn schur_and_iterative_roots_agree(seed in any::<u64>(), n in 1usize..16) {
        let mut rng = fixtures::rng(seed);
        let a = fixtures::accretive(n, 0.1, 2.0, 2.0, &mut rng);
        let s = principal_sqrt(&a).unwrap();
        let d = sqrt_denman_beavers(&a).unwrap();
        prop_assert!((s.matrix() - d.matrix()).norm() <= 1e-8 * s.norm());
    }

    #[test]
    fn exponential_semigroup_law(seed in any::<u64>(), n in 1usize..12, i in 0usize..3, j in 0usize..3) {
        let ts = [0.1, 0.5, 1.0];
        let (s, t) = (ts[i], ts[j]);
        let mut rng = fixtures::rng(seed);
        let a = fixtures::accretive(n, 0.0, 2.0, 2.0, &mut rng);
        let lhs = expm(&a.scale(real(-(s + t)))).unwrap();
        let rhs = &expm(&a.scale(real(-s))).unwrap() * &expm(&a.scale(real(-t))).unwrap();
        let cond = linalg::spectral_norm(lhs.matrix()).max(1.0);
        prop_assert!((lhs.matrix() - rhs.matrix()).norm() <= 1e-9 * cond);
    }
}

#[test]
fn fractional_power_angle() {
    let rule = QuadratureRule::balakrishnan_default();
    let mut rng = fixtures::rng(17);
    for _ in 0..20 {
        let t = fixtures::accretive(6, 0.1, 3.0, 3.0, &mut rng);
        for alpha in [0.25, 0.5, 0.75] {
            let p = balakrishnan_power(&t, alpha, &rule).unwrap();
            let s = Sector::at_origin((alpha * FRAC_PI_2 + 1e-3).min(FRAC_PI_2)).unwrap();
            assert!(sector_test(&p, &s).pass, "alpha = {alpha}");
        }
    }
}

#[test]
fn fractional_powers_compose() {
    let rule = QuadratureRule::balakrishnan_default();
    let mut rng = fixtures::rng(23);
    let t = fixtures::accretive(5, 0.5, 2.0, 1.0, &mut rng);
    let q = balakrishnan_power(&t, 0.25, &rule).unwrap();
    let h = balakrishnan_power(&t, 0.5, &rule).unwrap();
    assert!(((&q * &q).matrix() - h.matrix()).norm() <= 1e-7 * h.norm());
}

#[test]
fn identity_root() {
    assert_eq!(principal_sqrt(&LinOp::identity(3)).unwrap(), LinOp::identity(3));
}
