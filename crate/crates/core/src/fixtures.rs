//! Seeded operator generators and the named fixtures used by tests, the
//! acceptance suite, and the CLI.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::linop::{c64, real, CMat, CVec, LinOp};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`; used to give every
/// parallel chunk its own reproducible generator.
pub fn rng_stream(seed: u64, stream: u64) -> FixtureRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(n, n, |_, _| gaussian(rng))
}

/// Uniformly distributed unit vector in `C^n`.
pub fn unit_vector(n: usize, rng: &mut impl Rng) -> CVec {
    let v = CVec::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / real(norm)
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
pub fn unitary(n: usize, rng: &mut impl Rng) -> CMat {
    let qr = gaussian_matrix(n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { real(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Hermitian positive definite matrix with spectrum in `[lo, hi]`.
pub fn hermitian_with_spectrum(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> CMat {
    let u = unitary(n, rng);
    let d: Vec<Complex64> = (0..n).map(|_| real(lo + (hi - lo) * rng.random::<f64>())).collect();
    let h = &u * CMat::from_diagonal(&CVec::from_vec(d)) * u.adjoint();
    linalg::hermitian_part(&h)
}

/// Accretive operator whose Hermitian part has spectrum in `[margin, margin + spread]`,
/// plus a random skew-Hermitian part of norm up to `skew`.
pub fn accretive(n: usize, margin: f64, spread: f64, skew: f64, rng: &mut impl Rng) -> LinOp {
    let h = hermitian_with_spectrum(n, margin, margin + spread, rng);
    let k = hermitian_with_spectrum(n, -skew, skew, rng) * c64(0.0, 1.0);
    LinOp::from_computed(h + k)
}

/// Operator whose numerical range lies inside the closed sector of
/// half-angle `omega`: `A = H + i H^{1/2} M H^{1/2}` with `‖M‖ ≤ tan(omega)·fill`.
pub fn sectorial(n: usize, omega: f64, lo: f64, hi: f64, fill: f64, rng: &mut impl Rng) -> LinOp {
    let u = unitary(n, rng);
    let d: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let sqrt_h = &u * CMat::from_diagonal(&CVec::from_iterator(n, d.iter().map(|x| real(x.sqrt())))) * u.adjoint();
    let h = &sqrt_h * &sqrt_h;
    let bound = omega.tan() * fill;
    let m = hermitian_with_spectrum(n, -bound, bound, rng);
    let s = &sqrt_h * m * &sqrt_h;
    LinOp::from_computed(linalg::hermitian_part(&h) + linalg::hermitian_part(&s) * c64(0.0, 1.0))
}

/// The 2x2 matrix whose numerical range sits in the π/4 sector while the
/// numerical range of its square leaves the right half-plane.
pub fn sector_counterexample() -> LinOp {
    LinOp::from_computed(DMatrix::from_row_slice(
        2,
        2,
        &[c64(4.0, -1.0), c64(0.0, 4.0), c64(0.0, 4.0), c64(16.0, 4.0)],
    ))
}

/// 2x2 Jordan block with eigenvalue `lambda`.
pub fn jordan2(lambda: Complex64) -> LinOp {
    LinOp::from_computed(DMatrix::from_row_slice(2, 2, &[lambda, real(1.0), real(0.0), lambda]))
}

/// `coeffs[0] I + coeffs[1] B + coeffs[2] B^2 + ...`
pub fn polynomial_in(b: &LinOp, coeffs: &[Complex64]) -> LinOp {
    let n = b.dim();
    let mut acc = CMat::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = &acc * b.matrix();
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    LinOp::from_computed(acc)
}
