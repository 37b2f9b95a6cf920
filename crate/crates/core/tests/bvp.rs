use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qpencil::bvp::{default_panel_rule, direct_solve, solve_bvp, uniform_grid, BvpProblem, Forcing};
use qpencil::fixtures::{self, FixtureRng};
use qpencil::pencil::{factorize, Convention, Factorization, PencilSpec};
use qpencil::{linalg, real, CMat, CVec, LinOp};

/// Accretive `B` with `B²` accretive and `C = I + B`, which commutes with `B`.
fn commuting(n: usize, rng: &mut FixtureRng) -> (PencilSpec, Factorization) {
    let b = fixtures::sectorial(n, PI / 6.0, 0.3, 2.0, 0.9, rng);
    let c = fixtures::polynomial_in(&b, &[real(1.0), real(1.0)]);
    let p = PencilSpec::new(b, c).unwrap();
    let f = factorize(&p, Convention::RealRoot).unwrap();
    (p, f)
}

fn random_forcing(n: usize, intervals: usize, rng: &mut FixtureRng) -> Forcing {
    let x = uniform_grid(intervals);
    let values = x.iter().map(|_| CVec::from_fn(n, |_, _| fixtures::gaussian(rng))).collect();
    Forcing::new(x, values).unwrap()
}

fn random_vec(n: usize, rng: &mut FixtureRng) -> CVec {
    CVec::from_fn(n, |_, _| fixtures::gaussian(rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn formula_is_linear(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = fixtures::rng(seed);
        let (p, f) = commuting(n, &mut rng);
        let grid = uniform_grid(16);
        let mk = |u0: CVec, u1: CVec, g: Forcing| BvpProblem::new(p.clone(), u0, u1, g, grid.clone(), 2.0).unwrap();
        let (a0, a1, fa) = (random_vec(n, &mut rng), random_vec(n, &mut rng), random_forcing(n, 8, &mut rng));
        let (b0, b1, fb) = (random_vec(n, &mut rng), random_vec(n, &mut rng), random_forcing(n, 8, &mut rng));
        let sum_f = Forcing::new(fa.x.clone(), fa.values.iter().zip(&fb.values).map(|(x, y)| x + y).collect()).unwrap();
        let rule = default_panel_rule();
        let sa = solve_bvp(&mk(a0.clone(), a1.clone(), fa), &f, &rule).unwrap();
        let sb = solve_bvp(&mk(b0.clone(), b1.clone(), fb), &f, &rule).unwrap();
        let ss = solve_bvp(&mk(&a0 + &b0, &a1 + &b1, sum_f), &f, &rule).unwrap();
        let scale = sa.u.iter().chain(&sb.u).map(|v| v.norm()).fold(1.0, f64::max);
        for k in 0..grid.len() {
            prop_assert!((&ss.u[k] - &sa.u[k] - &sb.u[k]).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn boundary_values_are_reproduced(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = fixtures::rng(seed);
        let (p, f) = commuting(n, &mut rng);
        let (u0, u1) = (random_vec(n, &mut rng), random_vec(n, &mut rng));
        let g = random_forcing(n, 10, &mut rng);
        let scale = u0.norm().max(u1.norm()).max(1.0);
        let prob = BvpProblem::new(p, u0, u1, g, uniform_grid(10), 2.0).unwrap();
        let s = solve_bvp(&prob, &f, &default_panel_rule()).unwrap();
        prop_assert!(s.residual_bc.0 <= 1e-8 * scale && s.residual_bc.1 <= 1e-8 * scale);
    }
}

#[test]
fn formula_and_direct_agree_at_second_order() {
    let mut rng = fixtures::rng(31);
    for _ in 0..5 {
        let n = 8;
        let (p, f) = commuting(n, &mut rng);
        let v = fixtures::unit_vector(n, &mut rng);
        let (bv, cv) = (p.b.apply(&v), p.c.apply(&v));
        let g = |x: f64| {
            let (s, c) = (PI * x).sin_cos();
            &v * real(-PI * PI * c) + &bv * real(2.0 * PI * s) - &cv * real(c)
        };
        let mut fitted: f64 = 0.0;
        let mut diffs = Vec::new();
        for intervals in [32usize, 64, 128] {
            let h = 1.0 / intervals as f64;
            let x = uniform_grid(intervals);
            let prob = BvpProblem::new(p.clone(), v.clone(), -&v, Forcing::sample(&x, g).unwrap(), x, 2.0).unwrap();
            let s = solve_bvp(&prob, &f, &default_panel_rule()).unwrap();
            let d = direct_solve(&prob, intervals - 1).unwrap();
            let diff = s.max_difference(&d).unwrap();
            fitted = fitted.max(diff / (h * h));
            diffs.push(diff);
        }
        // the fitted constant stays bounded: h² behaviour on all three grids
        assert!(diffs.windows(2).all(|w| w[0] / w[1] > 3.8), "{diffs:?}, C = {fitted}");
    }
}

#[test]
fn modal_superposition() {
    let mut rng = fixtures::rng(41);
    for _ in 0..5 {
        let n = 5;
        let (p, f) = commuting(n, &mut rng);
        let (u0, u1) = (random_vec(n, &mut rng), random_vec(n, &mut rng));
        let prob = BvpProblem::new(p.clone(), u0.clone(), u1.clone(), Forcing::zero(n), uniform_grid(20), 2.0).unwrap();
        let s = solve_bvp(&prob, &f, &default_panel_rule()).unwrap();

        let pairs = linalg::eigenpairs(p.b.matrix()).unwrap();
        let v = CMat::from_columns(&pairs.iter().map(|(_, x)| x.clone()).collect::<Vec<_>>());
        let v_inv = v.clone().try_inverse().unwrap();
        let (w0, w1) = (&v_inv * &u0, &v_inv * &u1);
        let cond = linalg::spectral_norm(&v) * linalg::spectral_norm(&v_inv);
        let scale = cond * u0.norm().max(u1.norm());
        for (x, u) in s.x.iter().zip(&s.u) {
            let w = CVec::from_fn(n, |k, _| {
                let b = pairs[k].0;
                let c = real(1.0) + b;
                let root = (b * b + c).sqrt();
                let (mp, mm) = (b + root, b - root);
                // w = α e^{m₊x} + β e^{m₋x} with w(0) = w0, w(1) = w1
                let (ep, em) = (mp.exp(), mm.exp());
                let beta = (w1[k] - w0[k] * ep) / (em - ep);
                let alpha = w0[k] - beta;
                alpha * (mp * *x).exp() + beta * (mm * *x).exp()
            });
            let diff: CVec = u - &v * w;
            assert!(diff.norm() <= 1e-8 * scale, "x = {x}: {}", diff.norm());
        }
    }
}

#[test]
fn rotated_factorization_solves_the_same_problem() {
    // -Λ accretive, so only the rotated placement applies
    let b = LinOp::from_real_diagonal(&[1.0, 0.5]);
    let c = LinOp::from_real_diagonal(&[-5.0, -3.0]);
    let p = PencilSpec::new(b, c).unwrap();
    let f = factorize(&p, Convention::RotatedRoot).unwrap();
    let u0 = CVec::from_vec(vec![real(1.0), Complex64::new(0.0, 1.0)]);
    let prob = BvpProblem::new(p.clone(), u0.clone(), CVec::zeros(2), Forcing::zero(2), uniform_grid(64), 2.0).unwrap();
    let s = solve_bvp(&prob, &f, &default_panel_rule()).unwrap();
    let d = direct_solve(&prob, 63).unwrap();
    assert!(s.residual_bc.0 < 1e-10 && s.residual_bc.1 < 1e-10);
    assert!(s.max_difference(&d).unwrap() < 1e-3);
}
