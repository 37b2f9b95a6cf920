//! Dense kernels shared by the operator modules: norms, Hermitian and
//! general eigenproblems, null spaces, and guarded linear solves.

use nalgebra::linalg::{Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::{real, CMat, CVec};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 0;

/// Largest singular value. Zero for an empty matrix.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * real(0.5)
}

pub fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * real(0.5)
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending, with
/// eigenvectors as the matching columns.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    // symmetrize against rounding before handing to the solver
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_min_eigenvalue(h: &CMat) -> f64 {
    hermitian_eigen(h).0[0]
}

/// Complex Schur form `m = Q T Q*` with `T` upper triangular.
pub fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    let decomposition = Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::EigenFailure("complex Schur iteration did not converge".into()))?;
    let (q, mut t) = decomposition.unpack();
    for j in 0..t.ncols() {
        for i in (j + 1)..t.nrows() {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Eigenpairs of a general matrix with unit-norm eigenvectors, recovered
/// from the Schur form by back substitution.
pub fn eigenpairs(m: &CMat) -> Result<Vec<(Complex64, CVec)>> {
    let (q, t) = schur(m)?;
    let n = t.nrows();
    let scale = t.norm().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * scale;
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = CVec::zeros(n);
        y[k] = real(1.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[i] = -acc / d;
        }
        let mut v = &q * y;
        let nv = v.norm();
        v /= real(nv);
        pairs.push((lambda, v));
    }
    Ok(pairs)
}

/// Orthonormal basis (as columns) of the numerical null space: right
/// singular vectors whose singular value is below `rel_tol * ‖m‖`.
/// Works for rectangular `m` with at least as many rows as columns.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let ncols = m.ncols();
    if m.nrows() < ncols {
        let mut padded = CMat::zeros(ncols, ncols);
        padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        return null_space(&padded, rel_tol);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let threshold = rel_tol * smax;
    let cols: Vec<CVec> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= threshold || smax == 0.0)
        .map(|k| v_t.row(k).adjoint())
        .collect();
    if cols.is_empty() {
        CMat::zeros(ncols, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Largest sine of the principal angles measuring how far span(`u`) sits
/// outside span(`v`); both arguments have orthonormal columns. Zero when
/// span(`u`) ⊆ span(`v`).
pub fn containment_gap(u: &CMat, v: &CMat) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    if v.ncols() == 0 {
        return 1.0;
    }
    let residual = u - v * (v.adjoint() * u);
    spectral_norm(&residual).min(1.0)
}

/// Symmetric subspace distance: zero iff the spans coincide.
pub fn subspace_gap(u: &CMat, v: &CMat) -> f64 {
    if u.ncols() != v.ncols() {
        return 1.0;
    }
    containment_gap(u, v).max(containment_gap(v, u))
}

/// Solves `a x = b`, refusing when the smallest singular value of `a`
/// falls below `rel_tol * ‖a‖`.
pub fn solve_guarded(a: &CMat, b: &CMat, rel_tol: f64) -> Result<CMat> {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= rel_tol * smax {
        return Err(Error::SingularSystem { sigma_min: smin });
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(Error::SingularSystem { sigma_min: smin })
}

pub fn inverse_guarded(a: &CMat, rel_tol: f64) -> Result<CMat> {
    let n = a.nrows();
    solve_guarded(a, &CMat::identity(n, n), rel_tol)
}

/// Unguarded LU solve for systems already known to be well posed.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    a.clone().lu().solve(b).ok_or(Error::SingularSystem { sigma_min: 0.0 })
}

/// `log |det a|` through the LU factors.
pub fn log_abs_det(a: &CMat) -> f64 {
    let lu = a.clone().lu();
    let u = lu.u();
    (0..u.nrows()).map(|i| u[(i, i)].norm().ln()).sum()
}

/// 1-norm (maximum absolute column sum).
pub fn norm1(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Block tridiagonal solve by block Thomas elimination. Row `k` reads
/// `lower[k-1]·x_{k-1} + diag[k]·x_k + upper[k]·x_{k+1} = rhs[k]`.
pub fn block_tridiagonal_solve(lower: &[CMat], diag: &[CMat], upper: &[CMat], rhs: &[CVec]) -> Result<Vec<CVec>> {
    let m = diag.len();
    if m == 0 || rhs.len() != m || lower.len() + 1 != m || upper.len() + 1 != m {
        return Err(Error::InvalidArgument("block tridiagonal sizes do not match".into()));
    }
    let mut c_prime: Vec<CMat> = Vec::with_capacity(m - 1);
    let mut d_prime: Vec<CVec> = Vec::with_capacity(m);
    for k in 0..m {
        let (pivot, r) = if k == 0 {
            (diag[0].clone(), rhs[0].clone())
        } else {
            (
                &diag[k] - &lower[k - 1] * &c_prime[k - 1],
                &rhs[k] - &lower[k - 1] * &d_prime[k - 1],
            )
        };
        let lu = pivot.lu();
        let singular = || Error::SingularSystem { sigma_min: 0.0 };
        if k + 1 < m {
            c_prime.push(lu.solve(&upper[k]).ok_or_else(singular)?);
        }
        d_prime.push(lu.solve(&r).ok_or_else(singular)?);
    }
    let mut x = d_prime;
    for k in (0..m - 1).rev() {
        let next = x[k + 1].clone();
        x[k] -= &c_prime[k] * next;
    }
    if x.iter().any(|v| v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))) {
        return Err(Error::SingularSystem { sigma_min: 0.0 });
    }
    Ok(x)
}
