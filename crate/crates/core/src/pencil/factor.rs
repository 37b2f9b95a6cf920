//! Linear factors `Z₁, Z₂` of the pencil and the two factorization
//! residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{c64, real, LinOp};
use crate::matfun::{principal_sqrt, sqrt_with_kernel};
use crate::operator_core::accretivity_margin;
use crate::pencil::PencilSpec;

/// How the root enters the factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `Z₁,₂ = B ± S`.
    RealRoot,
    /// `Z₁,₂ = B ± iS`.
    RotatedRoot,
}

/// Which operator `S` is the principal root of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootTarget {
    /// `S = Λ^{1/2}`.
    Lambda,
    /// `S = (-Λ)^{1/2}`.
    NegLambda,
}

impl Convention {
    /// The root target that makes the factors multiply back to the pencil.
    pub fn natural_target(self) -> RootTarget {
        match self {
            Convention::RealRoot => RootTarget::Lambda,
            Convention::RotatedRoot => RootTarget::NegLambda,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub lambda: LinOp,
    pub root: LinOp,
    pub z1: LinOp,
    pub z2: LinOp,
    pub convention: Convention,
    pub root_target: RootTarget,
    /// `‖BS - SB‖`.
    pub commutator_norm: f64,
    /// Accretivity margin of `Λ`.
    pub lambda_margin: f64,
    /// Set when `Λ` vanished and `Z₁ = Z₂ = B` was returned.
    pub defective_lambda: bool,
}

impl Factorization {
    /// `(Z₂ - Z₁)^{-1}`. Uses `-½S^{-1}` (real) or `(i/2)S^{-1}` (rotated).
    pub fn difference_inverse(&self) -> Result<LinOp> {
        let s_inv = linalg::inverse_guarded(self.root.matrix(), 1e-13)?;
        let factor = match self.convention {
            Convention::RealRoot => real(-0.5),
            Convention::RotatedRoot => c64(0.0, 0.5),
        };
        LinOp::new(s_inv * factor)
    }
}

/// Factorization with the root target natural to `convention`.
pub fn factorize(p: &PencilSpec, convention: Convention) -> Result<Factorization> {
    factorize_branch(p, convention, convention.natural_target())
}

/// Factorization with an explicit root target. Combinations other than
/// the natural one do not in general factor the pencil; they exist so the
/// residuals can tell branches apart.
pub fn factorize_branch(p: &PencilSpec, convention: Convention, target: RootTarget) -> Result<Factorization> {
    let lambda = &p.b.square() + &p.c;
    let rooted = match target {
        RootTarget::Lambda => lambda.clone(),
        RootTarget::NegLambda => -&lambda,
    };
    // a semisimple kernel of Λ is carried into S; anything else on the cut is refused
    let root = match principal_sqrt(&rooted) {
        Err(Error::NegativeRealEigenvalue(z)) if z.norm() <= 1e-14 * rooted.norm() => sqrt_with_kernel(&rooted)?,
        other => other?,
    };
    Ok(assemble(p, lambda, root, convention, target, false))
}

/// The degenerate pencil `C = -B²`: `Λ = 0`, so `Z₁ = Z₂ = B`.
pub fn factorize_degenerate(p: &PencilSpec) -> Result<Factorization> {
    let lambda = &p.b.square() + &p.c;
    let scale = p.scale_at(real(0.0));
    if lambda.norm() > 1e-12 * scale.max(1.0) {
        return Err(Error::ConstraintViolated(format!(
            "Lambda has norm {:e}; the degenerate path needs Lambda = 0",
            lambda.norm()
        )));
    }
    let root = LinOp::zeros(p.dim());
    Ok(assemble(p, lambda, root, Convention::RealRoot, RootTarget::Lambda, true))
}

fn assemble(
    p: &PencilSpec,
    lambda: LinOp,
    root: LinOp,
    convention: Convention,
    target: RootTarget,
    defective_lambda: bool,
) -> Factorization {
    let offset = match convention {
        Convention::RealRoot => root.clone(),
        Convention::RotatedRoot => root.scale(c64(0.0, 1.0)),
    };
    let z1 = &p.b + &offset;
    let z2 = &p.b - &offset;
    let commutator_norm = p.b.commutator(&root).norm();
    let lambda_margin = accretivity_margin(&lambda);
    Factorization {
        lambda,
        root,
        z1,
        z2,
        convention,
        root_target: target,
        commutator_norm,
        lambda_margin,
        defective_lambda,
    }
}

fn shifted_product(lambda: Complex64, x: &LinOp, y: &LinOp) -> crate::linop::CMat {
    let lx = x.scale(real(-1.0)).shift(lambda);
    let ly = y.scale(real(-1.0)).shift(lambda);
    lx.matrix() * ly.matrix()
}

/// `‖Q(λ) - ½[(λ-Z₁)(λ-Z₂) + (λ-Z₂)(λ-Z₁)]‖`.
pub fn symmetrized_residual(f: &Factorization, p: &PencilSpec, lambda: Complex64) -> f64 {
    let sym = (shifted_product(lambda, &f.z1, &f.z2) + shifted_product(lambda, &f.z2, &f.z1)) * real(0.5);
    linalg::spectral_norm(&(p.matrix_at(lambda) - sym))
}

/// `‖Q(λ) - (λ-Z₁)(λ-Z₂)‖`.
pub fn ordered_residual(f: &Factorization, p: &PencilSpec, lambda: Complex64) -> f64 {
    linalg::spectral_norm(&(p.matrix_at(lambda) - shifted_product(lambda, &f.z1, &f.z2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn close(a: &LinOp, b: &LinOp, tol: f64) -> bool {
        (a.matrix() - b.matrix()).norm() <= tol
    }

    #[test]
    fn zero_b_diagonal_c() {
        let p = PencilSpec::new(LinOp::zeros(2), LinOp::from_real_diagonal(&[4.0, 9.0])).unwrap();
        let f = factorize(&p, Convention::RealRoot).unwrap();
        assert!(close(&f.z1, &LinOp::from_real_diagonal(&[2.0, 3.0]), 1e-14));
        assert!(close(&f.z2, &LinOp::from_real_diagonal(&[-2.0, -3.0]), 1e-14));
        assert!(ordered_residual(&f, &p, c64(0.3, -1.0)) < 1e-13);
    }

    #[test]
    fn diagonal_pencil() {
        let p = PencilSpec::new(LinOp::from_real_diagonal(&[1.0, 2.0]), LinOp::from_real_diagonal(&[3.0, 5.0])).unwrap();
        let f = factorize(&p, Convention::RealRoot).unwrap();
        assert!(close(&f.lambda, &LinOp::from_real_diagonal(&[4.0, 9.0]), 1e-14));
        assert!(close(&f.z1, &LinOp::from_real_diagonal(&[3.0, 5.0]), 1e-14));
        assert!(close(&f.z2, &LinOp::from_real_diagonal(&[-1.0, -1.0]), 1e-14));
        assert_eq!(f.commutator_norm, 0.0);
    }

    #[test]
    fn ordered_residual_is_commutator() {
        let mut rng = fixtures::rng(11);
        let b = fixtures::accretive(5, 0.5, 2.0, 1.0, &mut rng);
        let c = fixtures::accretive(5, 0.5, 2.0, 1.0, &mut rng);
        let p = PencilSpec::new(b, c).unwrap();
        let f = factorize(&p, Convention::RealRoot).unwrap();
        assert!(f.commutator_norm > 1e-3);
        for lambda in [real(0.0), c64(1.0, 1.0), c64(-3.0, 0.5)] {
            let r = ordered_residual(&f, &p, lambda);
            assert!((r - f.commutator_norm).abs() < 1e-10 * p.scale_at(lambda));
            assert!(symmetrized_residual(&f, &p, lambda) < 1e-10 * p.scale_at(lambda));
        }
    }

    #[test]
    fn rotated_convention_factors_negated_lambda() {
        // Λ = -diag(4, 9): no real principal root, rotated one is fine
        let p = PencilSpec::new(LinOp::from_real_diagonal(&[1.0, 1.0]), LinOp::from_real_diagonal(&[-5.0, -10.0])).unwrap();
        assert!(matches!(factorize(&p, Convention::RealRoot), Err(Error::NegativeRealEigenvalue(_))));
        let f = factorize(&p, Convention::RotatedRoot).unwrap();
        assert_eq!(f.root_target, RootTarget::NegLambda);
        let lambda = c64(0.2, 0.7);
        assert!(ordered_residual(&f, &p, lambda) < 1e-12 * p.scale_at(lambda));
        let tr = f.z1.trace() + f.z2.trace() - p.b.trace() * 2.0;
        assert!(tr.norm() < 1e-13);
        let literal = factorize_branch(&p, Convention::RealRoot, RootTarget::NegLambda).unwrap();
        let expected = linalg::spectral_norm(&(f.lambda.matrix() * real(2.0)));
        assert!((ordered_residual(&literal, &p, lambda) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn difference_inverse_both_conventions() {
        let p = PencilSpec::new(LinOp::from_real_diagonal(&[1.0, 2.0]), LinOp::from_real_diagonal(&[3.0, 5.0])).unwrap();
        for conv in [Convention::RealRoot, Convention::RotatedRoot] {
            let Ok(f) = factorize(&p, conv) else { continue };
            let d = &f.z2 - &f.z1;
            let inv = f.difference_inverse().unwrap();
            assert!(close(&(&d * &inv), &LinOp::identity(2), 1e-13));
        }
    }

    #[test]
    fn degenerate_pencil() {
        let b = LinOp::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let p = PencilSpec::new(b.clone(), -&b.square()).unwrap();
        // Λ = 0 is semisimple, so the generic path returns S = 0 as well
        let g = factorize(&p, Convention::RealRoot).unwrap();
        assert_eq!(g.root, LinOp::zeros(2));
        let f = factorize_degenerate(&p).unwrap();
        assert!(f.defective_lambda);
        assert_eq!(f.z1, b);
        assert_eq!(f.z2, b);
        let q = PencilSpec::new(b, LinOp::identity(2)).unwrap();
        assert!(matches!(factorize_degenerate(&q), Err(Error::ConstraintViolated(_))));
    }
}
