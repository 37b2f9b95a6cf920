//! The mixed-derivative problem (E) on the unit square,
//!
//! `u_xx - 2p₀u_xy - 2p₁u_x + αp₀u_y + (αp₁ + β)u - γu = f`,
//!
//! written as `u'' - 2Bu' - (γ - C)u = f` with `B = p₀∂_y + p₁` and
//! `C = αp₀∂_y + αp₁ + β` under homogeneous Dirichlet conditions in `y`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bvp::{default_panel_rule, solve_bvp, uniform_grid, BvpProblem, Forcing};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linop::{real, CMat, CVec, LinOp};
use crate::operator_core::{accretivity_margin, sector_test, Sector, MARGIN_RTOL};
use crate::pencil::{
    factor_shift_search, factorize, factorize_branch, ordered_residual, Convention, Factorization, PencilSpec,
    RootTarget,
};
use crate::semigroup::{contraction_check, DEFAULT_T_SAMPLES};

/// A coefficient function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoefficientData {
    /// Values on a uniform grid of `[0, 1]` including both end points,
    /// linearly interpolated.
    Samples { values: Vec<f64> },
    /// Polynomial coefficients in increasing degree.
    Poly { coeffs: Vec<f64> },
}

impl CoefficientData {
    pub fn constant(c: f64) -> Self {
        CoefficientData::Poly { coeffs: vec![c] }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            CoefficientData::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c),
            CoefficientData::Samples { values } => {
                let m = values.len() - 1;
                let pos = (y.clamp(0.0, 1.0) * m as f64).min(m as f64);
                let k = (pos.floor() as usize).min(m - 1);
                let w = pos - k as f64;
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            CoefficientData::Poly { coeffs } => !coeffs.is_empty() && coeffs.iter().all(|c| c.is_finite()),
            CoefficientData::Samples { values } => values.len() >= 2 && values.iter().all(|c| c.is_finite()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("coefficient {name} is empty or not finite")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeCoefficients {
    pub p0: CoefficientData,
    pub p1: CoefficientData,
    pub alpha: f64,
    pub beta: Complex64,
    pub r: f64,
    /// `None` selects `ε = m₀ / (8·M₁·(1 + r))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Interior nodes in `y`.
    pub n_y: usize,
}

impl Default for PdeCoefficients {
    /// `p₀ = 1 + y/2`, `p₁ = 1`, `α = β = r = 1`, automatic `ε`, `n_y = 64`.
    fn default() -> Self {
        PdeCoefficients {
            p0: CoefficientData::Poly { coeffs: vec![1.0, 0.5] },
            p1: CoefficientData::constant(1.0),
            alpha: 1.0,
            beta: real(1.0),
            r: 1.0,
            epsilon: None,
            n_y: 64,
        }
    }
}

impl PdeCoefficients {
    pub fn validate(&self) -> Result<()> {
        self.p0.validate("p0")?;
        self.p1.validate("p1")?;
        if self.n_y < 4 {
            return Err(Error::InvalidArgument(format!("n_y must be at least 4, got {}", self.n_y)));
        }
        if !(self.r > 0.0) || self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::InvalidArgument("r and epsilon must be positive".into()));
        }
        if !(self.alpha.is_finite() && self.beta.re.is_finite() && self.beta.im.is_finite()) {
            return Err(Error::InvalidArgument("alpha and beta must be finite".into()));
        }
        let grid = self.y_grid();
        if let Some(y) = grid.iter().find(|&&y| self.p0.eval(y) == 0.0) {
            return Err(Error::ConstraintViolated(format!("p0 vanishes at y = {y}")));
        }
        Ok(())
    }

    pub fn with_n_y(&self, n_y: usize) -> Self {
        PdeCoefficients { n_y, ..self.clone() }
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.n_y + 1) as f64
    }

    /// All `n_y + 2` nodes including `y = 0` and `y = 1`.
    pub fn y_grid(&self) -> Vec<f64> {
        uniform_grid(self.n_y + 1)
    }

    /// The `n_y` interior nodes.
    pub fn y_interior(&self) -> Vec<f64> {
        let g = self.y_grid();
        g[1..=self.n_y].to_vec()
    }
}

/// Derivative of grid samples: centered inside, one-sided second order at
/// the two ends.
pub fn grid_derivative(v: &[f64], h: f64) -> Vec<f64> {
    let m = v.len();
    assert!(m >= 3, "derivative stencil needs three points");
    (0..m)
        .map(|k| {
            if k == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if k == m - 1 {
                (3.0 * v[m - 1] - 4.0 * v[m - 2] + v[m - 3]) / (2.0 * h)
            } else {
                (v[k + 1] - v[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Centered discretization of `p₀∂_y + p₁` on the interior nodes, with
/// both Dirichlet values eliminated.
pub fn discretize_b(c: &PdeCoefficients) -> Result<LinOp> {
    c.validate()?;
    let n = c.n_y;
    let h = c.h();
    let y = c.y_interior();
    let mut m = CMat::zeros(n, n);
    for k in 0..n {
        let a = c.p0.eval(y[k]) / (2.0 * h);
        if k > 0 {
            m[(k, k - 1)] = real(-a);
        }
        if k + 1 < n {
            m[(k, k + 1)] = real(a);
        }
        m[(k, k)] = real(c.p1.eval(y[k]));
    }
    LinOp::new(m)
}

/// `αB_h + βI`.
pub fn discretize_c(c: &PdeCoefficients) -> Result<LinOp> {
    let b = discretize_b(c)?;
    Ok(b.scale(real(c.alpha)).shift(c.beta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub m0: f64,
    /// `max |φ₁ - φ₀'|`.
    pub m1: f64,
    /// `max |φ₂|`.
    pub m2: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// `m₀ - ε(1 + r)M₁`.
    pub slack: f64,
}

/// `m₀, M₁, M₂` from `φ₀ = -p₀²`, `φ₁ = -p₀(p₀' + 2p₁)`,
/// `φ₂ = -(p₁² + p₀p₁')` on the full `y` grid, and
/// `γ = -((r + 1)/(4ε)·M₁ + M₂)`.
pub fn compute_bounds(c: &PdeCoefficients) -> Result<Bounds> {
    c.validate()?;
    let h = c.h();
    let y = c.y_grid();
    let p0: Vec<f64> = y.iter().map(|&t| c.p0.eval(t)).collect();
    let p1: Vec<f64> = y.iter().map(|&t| c.p1.eval(t)).collect();
    let dp0 = grid_derivative(&p0, h);
    let dp1 = grid_derivative(&p1, h);
    let phi0: Vec<f64> = p0.iter().map(|v| -v * v).collect();
    let dphi0 = grid_derivative(&phi0, h);
    let m0 = p0.iter().map(|v| v * v).fold(f64::INFINITY, f64::min) * (1.0 - 1e-6);
    let mut m1: f64 = 0.0;
    let mut m2: f64 = 0.0;
    for k in 0..y.len() {
        let phi1 = -p0[k] * (dp0[k] + 2.0 * p1[k]);
        let phi2 = -(p1[k] * p1[k] + p0[k] * dp1[k]);
        m1 = m1.max((phi1 - dphi0[k]).abs());
        m2 = m2.max(phi2.abs());
    }
    let epsilon = match c.epsilon {
        Some(e) => e,
        None if m1 > 0.0 => m0 / (8.0 * m1 * (1.0 + c.r)),
        None => 1.0,
    };
    let slack = m0 - epsilon * (1.0 + c.r) * m1;
    if !(slack > 0.0) {
        return Err(Error::ConstraintViolated(format!(
            "m0 - eps(1+r)M1 = {slack:e} must be positive (m0 = {m0}, M1 = {m1}, eps = {epsilon}, r = {})",
            c.r
        )));
    }
    let gamma = -((c.r + 1.0) / (4.0 * epsilon) * m1 + m2);
    Ok(Bounds {
        m0,
        m1,
        m2,
        gamma,
        epsilon,
        slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: u8,
    pub pass: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub n_y: usize,
    pub hypothesis_met: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ClaimReport {
    fn new(claim: u8, margin: f64, tolerance: f64, n_y: usize, hypothesis_met: bool) -> Self {
        ClaimReport {
            claim,
            pass: margin >= -tolerance,
            margin,
            tolerance,
            n_y,
            hypothesis_met,
            parameters: BTreeMap::new(),
            notes: vec!["discrete check on the grid; consistency evidence, not a proof".into()],
        }
    }

    fn param(mut self, k: &str, v: f64) -> Self {
        self.parameters.insert(k.into(), v);
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

/// The discrete operators of the example.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub b: LinOp,
    pub c: LinOp,
    pub bounds: Bounds,
    /// `-B² + C - γ`, i.e. minus the pencil's `Λ`.
    pub neg_lambda: LinOp,
    /// The `x`-direction pencil `(B, γ - C)`.
    pub pencil: PencilSpec,
}

pub fn discretize(c: &PdeCoefficients) -> Result<Discretization> {
    let bounds = compute_bounds(c)?;
    let b = discretize_b(c)?;
    let cc = discretize_c(c)?;
    let neg_lambda = (-&b.square() + cc.clone()).shift(real(-bounds.gamma));
    let pencil = PencilSpec::new(b.clone(), (-&cc).shift(real(bounds.gamma)))?;
    Ok(Discretization {
        b,
        c: cc,
        bounds,
        neg_lambda,
        pencil,
    })
}

fn min_on_grid(c: &PdeCoefficients, g: impl Fn(f64, f64, f64, f64) -> f64) -> f64 {
    let h = c.h();
    let y = c.y_grid();
    let p0: Vec<f64> = y.iter().map(|&t| c.p0.eval(t)).collect();
    let p1: Vec<f64> = y.iter().map(|&t| c.p1.eval(t)).collect();
    let dp0 = grid_derivative(&p0, h);
    (0..y.len())
        .map(|k| g(p0[k], p1[k], dp0[k], y[k]))
        .fold(f64::INFINITY, f64::min)
}

/// Claims 1–6 on the grid.
pub fn verify_claims(c: &PdeCoefficients) -> Result<Vec<ClaimReport>> {
    let d = discretize(c)?;
    let n_y = c.n_y;
    let tol = |a: &LinOp| MARGIN_RTOL * a.norm().max(1.0);
    let b_hyp = min_on_grid(c, |_, p1, dp0, _| p1 - 0.5 * dp0);
    let c_hyp = min_on_grid(c, |_, p1, dp0, _| c.alpha * p1 + c.beta.re - 0.5 * c.alpha * dp0);

    let omega = (1.0 / c.r).atan();
    let op1 = (-&d.b.square()).shift(real(-d.bounds.gamma));
    let v1 = sector_test(&op1, &Sector::at_origin(omega)?);
    let claim1 = ClaimReport::new(1, v1.margin, tol(&op1), n_y, d.bounds.slack > 0.0)
        .param("omega", omega)
        .param("gamma", d.bounds.gamma)
        .param("m0", d.bounds.m0)
        .param("M1", d.bounds.m1)
        .param("M2", d.bounds.m2)
        .param("epsilon", d.bounds.epsilon);

    let claim2 = ClaimReport::new(2, accretivity_margin(&d.c), tol(&d.c), n_y, c_hyp >= 0.0)
        .param("continuous_lower_bound", c_hyp);
    let claim3 = ClaimReport::new(3, accretivity_margin(&d.b), tol(&d.b), n_y, b_hyp >= 0.0)
        .param("continuous_lower_bound", b_hyp);
    let claim4 = ClaimReport::new(4, accretivity_margin(&d.neg_lambda), tol(&d.neg_lambda), n_y, b_hyp >= 0.0 && c_hyp >= 0.0)
        .note("accretive equals m-accretive in finite dimension");

    let sv = linalg::singular_values(&d.neg_lambda);
    let sigma_min = *sv.last().expect("non-empty");
    let claim5 = ClaimReport::new(5, sigma_min - 1e-12 * sv[0], 0.0, n_y, true).param("sigma_min", sigma_min);

    let claim6 = claim6_report(&d, n_y)?;
    Ok(vec![claim1, claim2, claim3, claim4, claim5, claim6])
}

fn claim6_report(d: &Discretization, n_y: usize) -> Result<ClaimReport> {
    let literal = factorize_branch(&d.pencil, Convention::RealRoot, RootTarget::NegLambda)?;
    let rotated = factorize(&d.pencil, Convention::RotatedRoot)?;
    let mut worst: f64 = 0.0;
    let mut report = ClaimReport::new(6, 0.0, 0.0, n_y, true);
    for (name, f) in [("literal", &literal), ("rotated", &rotated)] {
        let s = factor_shift_search(f, 0.0)?;
        let w1 = contraction_check(&f.z1.shift(real(s.r1)), &DEFAULT_T_SAMPLES)?;
        let w2 = contraction_check(&(-&f.z2).shift(real(s.r2)), &DEFAULT_T_SAMPLES)?;
        worst = worst.max(w1).max(w2);
        report = report
            .param(&format!("{name}_r1"), s.r1)
            .param(&format!("{name}_r2"), s.r2)
            .param(&format!("{name}_contraction"), w1.max(w2));
    }
    report.margin = 1.0 + 1e-12 - worst;
    report.pass = report.margin >= 0.0;
    Ok(report.note("shifts r1, r2 are the smallest making Z1 + r1 and -Z2 + r2 pi/4-sectorial"))
}

/// Outcome of comparing the two root branches on the example's pencil.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionAdjudication {
    /// `Z = B ± (-Λ)^{1/2}`.
    pub literal_residual: Option<f64>,
    /// `Z = B ± i(-Λ)^{1/2}`.
    pub rotated_residual: Option<f64>,
    pub scale: f64,
    pub threshold: f64,
    /// How many branches factor the pencil within the threshold.
    pub factoring_branches: usize,
    pub chosen: Convention,
}

fn branch_residual(p: &PencilSpec, f: &Factorization) -> f64 {
    [real(0.0), Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.5)]
        .iter()
        .map(|&l| ordered_residual(f, p, l))
        .fold(0.0, f64::max)
}

/// Factorizes `(B, γ - C)` with `S = (-Λ)^{1/2}` in both the literal and
/// the rotated placement and measures the ordered residual of each.
pub fn adjudicate_convention(p: &PencilSpec) -> Result<(ConventionAdjudication, Option<Factorization>, Option<Factorization>)> {
    let scale = p.scale_at(real(0.0));
    let threshold = 1e-8 * scale;
    let literal = factorize_branch(p, Convention::RealRoot, RootTarget::NegLambda).ok();
    let rotated = factorize(p, Convention::RotatedRoot).ok();
    let lr = literal.as_ref().map(|f| branch_residual(p, f));
    let rr = rotated.as_ref().map(|f| branch_residual(p, f));
    let factoring_branches = [lr, rr].iter().filter(|r| r.is_some_and(|v| v <= threshold)).count();
    let chosen = match (lr, rr) {
        (Some(l), Some(r)) if l < r => Convention::RealRoot,
        (Some(_), None) => Convention::RealRoot,
        _ => Convention::RotatedRoot,
    };
    Ok((
        ConventionAdjudication {
            literal_residual: lr,
            rotated_residual: rr,
            scale,
            threshold,
            factoring_branches,
            chosen,
        },
        literal,
        rotated,
    ))
}

/// Branch selection for [`solve_example`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionChoice {
    Real,
    Rotated,
    #[default]
    Auto,
}

/// Data of the 2D problem sampled on the grids: `f` at every `x` node of a
/// uniform grid with `n_x` intervals and every interior `y` node.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeData {
    pub n_x: usize,
    pub f: Vec<CVec>,
    pub u0: CVec,
    pub u1: CVec,
}

impl PdeData {
    pub fn from_fn(
        c: &PdeCoefficients,
        n_x: usize,
        f: impl Fn(f64, f64) -> Complex64,
        u0: impl Fn(f64) -> Complex64,
        u1: impl Fn(f64) -> Complex64,
    ) -> Self {
        let y = c.y_interior();
        let x = uniform_grid(n_x);
        PdeData {
            n_x,
            f: x.iter().map(|&xi| CVec::from_iterator(y.len(), y.iter().map(|&yj| f(xi, yj)))).collect(),
            u0: CVec::from_iterator(y.len(), y.iter().map(|&yj| u0(yj))),
            u1: CVec::from_iterator(y.len(), y.iter().map(|&yj| u1(yj))),
        }
    }

    pub fn zero(c: &PdeCoefficients, n_x: usize) -> Self {
        Self::from_fn(c, n_x, |_, _| real(0.0), |_| real(0.0), |_| real(0.0))
    }
}

#[derive(Clone, Debug)]
pub struct PdeSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Formula solution, one interior-`y` vector per `x` node.
    pub formula: Vec<CVec>,
    /// Tensor-grid finite-difference solution on the same nodes.
    pub direct: Vec<CVec>,
    pub max_discrepancy: f64,
    pub adjudication: ConventionAdjudication,
    pub used: Convention,
    pub residual_bc: (f64, f64),
}

/// Solves the 2D problem with the explicit formula on the `x`-direction
/// pencil and with a direct tensor-grid finite-difference solve.
pub fn solve_example(c: &PdeCoefficients, data: &PdeData, choice: ConventionChoice) -> Result<PdeSolution> {
    let d = discretize(c)?;
    if data.f.len() != data.n_x + 1 || data.u0.len() != c.n_y || data.u1.len() != c.n_y {
        return Err(Error::DimensionMismatch {
            expected: data.n_x + 1,
            found: data.f.len(),
        });
    }
    let (adj, literal, rotated) = adjudicate_convention(&d.pencil)?;
    let used = match choice {
        ConventionChoice::Real => Convention::RealRoot,
        ConventionChoice::Rotated => Convention::RotatedRoot,
        ConventionChoice::Auto => adj.chosen,
    };
    let fact = match used {
        Convention::RealRoot => literal,
        Convention::RotatedRoot => rotated,
    }
    .ok_or_else(|| Error::ConstraintViolated(format!("no {used:?} factorization for this pencil")))?;
    let x = uniform_grid(data.n_x);
    let prob = BvpProblem::new(
        d.pencil.clone(),
        data.u0.clone(),
        data.u1.clone(),
        Forcing::new(x.clone(), data.f.clone())?,
        x.clone(),
        2.0,
    )?;
    let sol = solve_bvp(&prob, &fact, &default_panel_rule())?;
    let direct = direct_2d(c, &d.bounds, data)?;
    let max_discrepancy = sol
        .u
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(PdeSolution {
        x,
        y: c.y_interior(),
        formula: sol.u,
        direct,
        max_discrepancy,
        adjudication: adj,
        used,
        residual_bc: sol.residual_bc,
    })
}

/// Second-order stencil for (E) on the tensor grid, assembled line by
/// line in `x` and solved by block elimination. The mixed derivative uses
/// the four-point cross stencil.
pub fn direct_2d(c: &PdeCoefficients, bounds: &Bounds, data: &PdeData) -> Result<Vec<CVec>> {
    let n = c.n_y;
    let m = data.n_x - 1;
    if data.n_x < 2 {
        return Err(Error::InvalidArgument("need at least two x intervals".into()));
    }
    let hx = 1.0 / data.n_x as f64;
    let hy = c.h();
    let y = c.y_interior();
    let (mut lower, mut diag, mut upper) = (CMat::zeros(n, n), CMat::zeros(n, n), CMat::zeros(n, n));
    for j in 0..n {
        let p0 = c.p0.eval(y[j]);
        let p1 = c.p1.eval(y[j]);
        let cross = -2.0 * p0 / (4.0 * hx * hy);
        let ux = -2.0 * p1 / (2.0 * hx);
        let uy = c.alpha * p0 / (2.0 * hy);
        // u_{i±1, j}
        upper[(j, j)] = real(1.0 / (hx * hx) + ux);
        lower[(j, j)] = real(1.0 / (hx * hx) - ux);
        diag[(j, j)] = real(-2.0 / (hx * hx) + c.alpha * p1 - bounds.gamma) + c.beta;
        if j + 1 < n {
            upper[(j, j + 1)] = real(cross);
            lower[(j, j + 1)] = real(-cross);
            diag[(j, j + 1)] = real(uy);
        }
        if j > 0 {
            upper[(j, j - 1)] = real(-cross);
            lower[(j, j - 1)] = real(cross);
            diag[(j, j - 1)] = real(-uy);
        }
    }
    if m == 0 {
        return Ok(vec![data.u0.clone(), data.u1.clone()]);
    }
    let mut rhs: Vec<CVec> = data.f[1..data.n_x].to_vec();
    rhs[0] -= &lower * &data.u0;
    rhs[m - 1] -= &upper * &data.u1;
    let inner = linalg::block_tridiagonal_solve(&vec![lower; m - 1], &vec![diag; m], &vec![upper; m - 1], &rhs)?;
    let mut out = Vec::with_capacity(data.n_x + 1);
    out.push(data.u0.clone());
    out.extend(inner);
    out.push(data.u1.clone());
    Ok(out)
}

/// Manufactured solution `u = sin(πy)cos(πx)` and its forcing under (E).
pub fn manufactured(c: &PdeCoefficients, gamma: f64) -> (impl Fn(f64, f64) -> Complex64 + '_, impl Fn(f64, f64) -> f64) {
    use std::f64::consts::PI;
    let exact = |x: f64, y: f64| (PI * y).sin() * (PI * x).cos();
    let forcing = move |x: f64, y: f64| {
        let (sx, cx) = (PI * x).sin_cos();
        let (sy, cy) = (PI * y).sin_cos();
        let p0 = c.p0.eval(y);
        let p1 = c.p1.eval(y);
        let u = sy * cx;
        let u_xx = -PI * PI * sy * cx;
        let u_xy = -PI * PI * cy * sx;
        let u_x = -PI * sy * sx;
        let u_y = PI * cy * cx;
        real(u_xx - 2.0 * p0 * u_xy - 2.0 * p1 * u_x + c.alpha * p0 * u_y + (c.alpha * p1 - gamma) * u) + c.beta * u
    };
    (forcing, exact)
}

/// Angle of `ω = arctan(1/r)` clipped to the valid range.
pub fn claim1_angle(r: f64) -> f64 {
    (1.0 / r).atan().min(FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(p0: f64, p1: f64, n_y: usize) -> PdeCoefficients {
        PdeCoefficients {
            p0: CoefficientData::constant(p0),
            p1: CoefficientData::constant(p1),
            alpha: 1.0,
            beta: real(0.0),
            r: 1.0,
            epsilon: Some(0.1),
            n_y,
        }
    }

    #[test]
    fn constant_stencil() {
        let c = constant(1.0, 0.0, 4);
        let b = discretize_b(&c).unwrap();
        let h = c.h();
        assert_eq!(b[(1, 2)], real(1.0 / (2.0 * h)));
        assert_eq!(b[(1, 0)], real(-1.0 / (2.0 * h)));
        assert_eq!(b[(1, 1)], real(0.0));
        let b1 = discretize_b(&constant(1.0, 1.0, 4)).unwrap();
        assert_eq!(b1.matrix() - b.matrix(), CMat::identity(4, 4));
    }

    #[test]
    fn c_is_affine_in_b() {
        let mut c = constant(1.0, 1.0, 6);
        c.alpha = 0.0;
        c.beta = Complex64::new(2.0, -1.0);
        assert_eq!(discretize_c(&c).unwrap(), LinOp::identity(6).scale(c.beta));
        c.alpha = 1.0;
        c.beta = real(0.0);
        assert_eq!(discretize_c(&c).unwrap(), discretize_b(&c).unwrap());
        let d = discretize(&PdeCoefficients::default()).unwrap();
        assert_eq!(d.b.commutator(&d.c).norm(), 0.0);
    }

    #[test]
    fn bounds_hand_cases() {
        let b = compute_bounds(&constant(1.0, 0.0, 16)).unwrap();
        assert!(b.m0 < 1.0 && b.m0 > 1.0 - 1e-5);
        assert_eq!((b.m1, b.m2, b.gamma), (0.0, 0.0, 0.0));

        let mut c = constant(1.0, 0.0, 16);
        c.p0 = CoefficientData::Poly { coeffs: vec![1.0, 1.0] };
        c.epsilon = Some(0.05);
        let b = compute_bounds(&c).unwrap();
        assert!((b.m1 - 2.0).abs() < 1e-12 && b.m2.abs() < 1e-12);
        assert!((b.gamma + (c.r + 1.0) / (2.0 * 0.05)).abs() < 1e-9);

        let c = constant(1.0, 1.0, 16);
        let b = compute_bounds(&c).unwrap();
        assert!((b.m1 - 2.0).abs() < 1e-12 && (b.m2 - 1.0).abs() < 1e-12);
        assert!((b.gamma + ((c.r + 1.0) / (2.0 * 0.1) + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn bounds_reject_bad_epsilon() {
        let mut c = constant(1.0, 1.0, 16);
        c.epsilon = Some(1.0);
        assert!(matches!(compute_bounds(&c), Err(Error::ConstraintViolated(_))));
    }

    #[test]
    fn derivative_is_exact_on_quadratics() {
        let h = 0.1;
        let v: Vec<f64> = (0..11).map(|k| (k as f64 * h).powi(2)).collect();
        let d = grid_derivative(&v, h);
        for (k, dk) in d.iter().enumerate() {
            assert!((dk - 2.0 * k as f64 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn claim3_boundary_case_and_claim2_failure() {
        let claims = verify_claims(&constant(1.0, 0.0, 16)).unwrap();
        let c3 = &claims[2];
        assert!(c3.pass && c3.margin.abs() < 1e-12);
        let mut c = constant(1.0, 0.0, 16);
        c.beta = real(-0.5);
        let claims = verify_claims(&c).unwrap();
        assert!(!claims[1].pass && claims[1].margin < 0.0 && !claims[1].hypothesis_met);
    }

    #[test]
    fn zero_data_gives_zero_both_ways() {
        let c = PdeCoefficients::default().with_n_y(12);
        let s = solve_example(&c, &PdeData::zero(&c, 8), ConventionChoice::Auto).unwrap();
        assert!(s.formula.iter().chain(&s.direct).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn samples_and_poly_agree() {
        let poly = CoefficientData::Poly { coeffs: vec![1.0, 0.5] };
        let samples = CoefficientData::Samples {
            values: (0..=10).map(|k| 1.0 + 0.05 * k as f64).collect(),
        };
        for y in [0.0, 0.13, 0.5, 0.99, 1.0] {
            assert!((poly.eval(y) - samples.eval(y)).abs() < 1e-14);
        }
    }
}
