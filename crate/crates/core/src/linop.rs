//! Dense complex square operators.

use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A finite-dimensional stand-in for a Hilbert-space operator: a square
/// complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOp(CMat);

impl LinOp {
    /// Wraps a matrix, rejecting non-square shapes and non-finite entries.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(LinOp(m))
    }

    /// Wraps the result of arithmetic on already-validated operators.
    pub(crate) fn from_computed(m: CMat) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        LinOp(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, cols: r.len() });
            }
        }
        Self::new(CMat::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| real(x)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        LinOp(CMat::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        LinOp(CMat::zeros(n, n))
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        LinOp(CMat::from_diagonal(&CVec::from_column_slice(d)))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let d: Vec<Complex64> = d.iter().map(|&x| real(x)).collect();
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn adjoint(&self) -> LinOp {
        LinOp(self.0.adjoint())
    }

    /// Spectral (operator 2-) norm.
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.0)
    }

    pub fn scale(&self, c: Complex64) -> LinOp {
        LinOp(&self.0 * c)
    }

    /// `A + c I`.
    pub fn shift(&self, c: Complex64) -> LinOp {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        LinOp(m)
    }

    pub fn square(&self) -> LinOp {
        LinOp(&self.0 * &self.0)
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &LinOp) -> LinOp {
        LinOp(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn apply(&self, x: &CVec) -> CVec {
        &self.0 * x
    }

    /// `⟨A x, x⟩`, linear in the first slot.
    pub fn quadratic_form(&self, x: &CVec) -> Complex64 {
        x.dotc(&(&self.0 * x))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            })
        }
    }
}

impl Deref for LinOp {
    type Target = CMat;

    fn deref(&self) -> &CMat {
        &self.0
    }
}

impl Add for &LinOp {
    type Output = LinOp;

    fn add(self, rhs: &LinOp) -> LinOp {
        LinOp(&self.0 + &rhs.0)
    }
}

impl Sub for &LinOp {
    type Output = LinOp;

    fn sub(self, rhs: &LinOp) -> LinOp {
        LinOp(&self.0 - &rhs.0)
    }
}

impl Mul for &LinOp {
    type Output = LinOp;

    fn mul(self, rhs: &LinOp) -> LinOp {
        LinOp(&self.0 * &rhs.0)
    }
}

impl Mul<&CVec> for &LinOp {
    type Output = CVec;

    fn mul(self, rhs: &CVec) -> CVec {
        &self.0 * rhs
    }
}

impl Neg for &LinOp {
    type Output = LinOp;

    fn neg(self) -> LinOp {
        LinOp(-&self.0)
    }
}

impl Sub<LinOp> for LinOp {
    type Output = LinOp;

    fn sub(self, rhs: LinOp) -> LinOp {
        &self - &rhs
    }
}

impl Add<LinOp> for LinOp {
    type Output = LinOp;

    fn add(self, rhs: LinOp) -> LinOp {
        &self + &rhs
    }
}
