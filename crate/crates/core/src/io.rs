//! JSON schemas for operators, pencils and problems, and CSV writers for
//! solutions.
//!
//! Complex numbers are `[re, im]` pairs; operators are
//! `{"dim": n, "entries": [[[re, im], ...], ...]}` in row-major order.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bvp::{BvpProblem, BvpSolution, Forcing};
use crate::error::{Error, Result};
use crate::linop::{CMat, CVec, LinOp};
use crate::pde_example::{PdeCoefficients, PdeSolution};
use crate::pencil::PencilSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl From<&LinOp> for OperatorFile {
    fn from(a: &LinOp) -> Self {
        let n = a.dim();
        OperatorFile {
            dim: n,
            entries: (0..n).map(|i| (0..n).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect()).collect(),
        }
    }
}

impl TryFrom<&OperatorFile> for LinOp {
    type Error = Error;

    fn try_from(f: &OperatorFile) -> Result<LinOp> {
        if f.entries.len() != f.dim {
            return Err(Error::Parse(format!("expected {} rows, found {}", f.dim, f.entries.len())));
        }
        if let Some((i, r)) = f.entries.iter().enumerate().find(|(_, r)| r.len() != f.dim) {
            return Err(Error::Parse(format!("row {i} has {} entries, expected {}", r.len(), f.dim)));
        }
        LinOp::new(CMat::from_fn(f.dim, f.dim, |i, j| {
            let [re, im] = f.entries[i][j];
            Complex64::new(re, im)
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilFile {
    #[serde(rename = "B")]
    pub b: OperatorFile,
    #[serde(rename = "C")]
    pub c: OperatorFile,
}

impl From<&PencilSpec> for PencilFile {
    fn from(p: &PencilSpec) -> Self {
        PencilFile {
            b: (&p.b).into(),
            c: (&p.c).into(),
        }
    }
}

impl TryFrom<&PencilFile> for PencilSpec {
    type Error = Error;

    fn try_from(f: &PencilFile) -> Result<PencilSpec> {
        PencilSpec::new((&f.b).try_into()?, (&f.c).try_into()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingFile {
    pub x: Vec<f64>,
    pub values: Vec<Vec<[f64; 2]>>,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BvpFile {
    pub pencil: PencilFile,
    pub u0: Vec<[f64; 2]>,
    pub u1: Vec<[f64; 2]>,
    /// Missing means `f = 0`.
    #[serde(default)]
    pub f: Option<ForcingFile>,
    pub x_grid: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: f64,
}

pub fn vector_from_pairs(v: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&[re, im]| Complex64::new(re, im)))
}

pub fn vector_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl From<&BvpProblem> for BvpFile {
    fn from(p: &BvpProblem) -> Self {
        BvpFile {
            pencil: (&p.pencil).into(),
            u0: vector_to_pairs(&p.u0),
            u1: vector_to_pairs(&p.u1),
            f: Some(ForcingFile {
                x: p.f.x.clone(),
                values: p.f.values.iter().map(vector_to_pairs).collect(),
            }),
            x_grid: p.x_grid.clone(),
            p: p.p,
        }
    }
}

impl TryFrom<&BvpFile> for BvpProblem {
    type Error = Error;

    fn try_from(f: &BvpFile) -> Result<BvpProblem> {
        let pencil = PencilSpec::try_from(&f.pencil)?;
        let forcing = match &f.f {
            Some(ff) => Forcing::new(ff.x.clone(), ff.values.iter().map(|v| vector_from_pairs(v)).collect())?,
            None => Forcing::zero(pencil.dim()),
        };
        BvpProblem::new(
            pencil,
            vector_from_pairs(&f.u0),
            vector_from_pairs(&f.u1),
            forcing,
            f.x_grid.clone(),
            f.p,
        )
    }
}

fn parse<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn operator_from_json(s: &str) -> Result<LinOp> {
    LinOp::try_from(&parse::<OperatorFile>(s)?)
}

pub fn operator_to_json(a: &LinOp) -> String {
    serde_json::to_string(&OperatorFile::from(a)).expect("operator serializes")
}

pub fn pencil_from_json(s: &str) -> Result<PencilSpec> {
    PencilSpec::try_from(&parse::<PencilFile>(s)?)
}

pub fn pencil_to_json(p: &PencilSpec) -> String {
    serde_json::to_string(&PencilFile::from(p)).expect("pencil serializes")
}

pub fn bvp_from_json(s: &str) -> Result<BvpProblem> {
    BvpProblem::try_from(&parse::<BvpFile>(s)?)
}

pub fn bvp_to_json(p: &BvpProblem) -> String {
    serde_json::to_string(&BvpFile::from(p)).expect("problem serializes")
}

pub fn pde_from_json(s: &str) -> Result<PdeCoefficients> {
    let c: PdeCoefficients = parse(s)?;
    c.validate()?;
    Ok(c)
}

/// Columns `x, component_index, re_u, im_u`.
pub fn bvp_solution_csv(sol: &BvpSolution) -> String {
    let mut out = String::from("x,component_index,re_u,im_u\n");
    for (x, u) in sol.x.iter().zip(&sol.u) {
        for (k, z) in u.iter().enumerate() {
            writeln!(out, "{x:e},{k},{:e},{:e}", z.re, z.im).expect("string write");
        }
    }
    out
}

/// Columns `x, y, re_u, im_u` for the formula solution, Dirichlet rows in
/// `y` included.
pub fn pde_solution_csv(sol: &PdeSolution) -> String {
    grid_csv(&sol.x, &sol.y, &sol.formula)
}

pub fn grid_csv(x: &[f64], y_interior: &[f64], u: &[CVec]) -> String {
    let mut out = String::from("x,y,re_u,im_u\n");
    let n = y_interior.len();
    let h = 1.0 / (n + 1) as f64;
    for (xi, ui) in x.iter().zip(u) {
        writeln!(out, "{xi:e},{:e},0e0,0e0", 0.0).expect("string write");
        for (yj, z) in y_interior.iter().zip(ui.iter()) {
            writeln!(out, "{xi:e},{yj:e},{:e},{:e}", z.re, z.im).expect("string write");
        }
        writeln!(out, "{xi:e},{:e},0e0,0e0", (n + 1) as f64 * h).expect("string write");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::uniform_grid;
    use crate::linop::{c64, real};

    #[test]
    fn operator_round_trip() {
        let a = LinOp::from_rows(&[vec![c64(1.0, -2.0), real(0.5)], vec![c64(0.0, 3.0), real(-1e-300)]]).unwrap();
        let s = operator_to_json(&a);
        assert_eq!(operator_from_json(&s).unwrap(), a);
        assert!(s.starts_with("{\"dim\":2,\"entries\":[[[1.0,-2.0]"));
    }

    #[test]
    fn malformed_operators() {
        assert!(matches!(operator_from_json("{\"dim\":2,\"entries\":[[[1,0]]]}"), Err(Error::Parse(_))));
        assert!(matches!(operator_from_json("{\"dim\":1}"), Err(Error::Parse(_))));
        assert!(matches!(operator_from_json("[1, 2"), Err(Error::Parse(_))));
    }

    #[test]
    fn bvp_round_trip_and_csv() {
        let p = PencilSpec::new(LinOp::identity(2), LinOp::from_real_diagonal(&[1.0, 2.0])).unwrap();
        let f = Forcing::sample(&uniform_grid(4), |s| CVec::from_element(2, real(s))).unwrap();
        let prob = BvpProblem::new(p, CVec::zeros(2), CVec::from_element(2, real(1.0)), f, uniform_grid(3), 2.0).unwrap();
        let back = bvp_from_json(&bvp_to_json(&prob)).unwrap();
        assert_eq!(back, prob);
        let sol = BvpSolution {
            x: vec![0.0, 1.0],
            u: vec![CVec::zeros(2), CVec::zeros(2)],
            residual_ode: None,
            residual_bc: (0.0, 0.0),
            compatibility: None,
            sixth_term: None,
            convention: None,
        };
        let csv = bvp_solution_csv(&sol);
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv.lines().nth(1).unwrap(), "0e0,0,0e0,0e0");
    }

    #[test]
    fn pde_defaults_parse() {
        let c = pde_from_json(r#"{"p0":{"type":"poly","coeffs":[1,0.5]},"p1":{"type":"samples","values":[1,1]},"alpha":1,"beta":[1,0],"r":1,"n_y":64}"#).unwrap();
        assert_eq!(c.epsilon, None);
        assert_eq!(c.beta, real(1.0));
        assert!(pde_from_json(r#"{"p0":{"type":"poly","coeffs":[]},"p1":{"type":"poly","coeffs":[1]},"alpha":1,"beta":[0,0],"r":1,"n_y":64}"#).is_err());
    }
}
