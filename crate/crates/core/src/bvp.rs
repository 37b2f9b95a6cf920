//! The two-point problem `u'' - 2Bu' - Cu = f` on `(0, 1)`,
//! `u(0) = u₀`, `u(1) = u₁`: the explicit semigroup formula, a block
//! finite-difference solver, and residual diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;
use crate::linop::{real, CMat, CVec, LinOp};
use crate::matfun::QuadratureRule;
use crate::pencil::{Convention, Factorization, PencilSpec};
use crate::semigroup::PropagatorCache;

/// Forcing given as samples on its own strictly increasing grid covering
/// `[0, 1]`, linearly interpolated in between.
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing {
    pub x: Vec<f64>,
    pub values: Vec<CVec>,
}

impl Forcing {
    pub fn new(x: Vec<f64>, values: Vec<CVec>) -> Result<Self> {
        check_grid(&x, "forcing grid")?;
        if values.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: values.len(),
            });
        }
        Ok(Forcing { x, values })
    }

    pub fn zero(n: usize) -> Self {
        Forcing {
            x: vec![0.0, 1.0],
            values: vec![CVec::zeros(n), CVec::zeros(n)],
        }
    }

    /// Samples of `g` on `x`.
    pub fn sample(x: &[f64], g: impl Fn(f64) -> CVec) -> Result<Self> {
        Self::new(x.to_vec(), x.iter().map(|&s| g(s)).collect())
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn at(&self, s: f64) -> CVec {
        let k = match self.x.partition_point(|&t| t <= s) {
            0 => 0,
            p if p >= self.x.len() => self.x.len() - 2,
            p => p - 1,
        };
        let (a, b) = (self.x[k], self.x[k + 1]);
        let w = ((s - a) / (b - a)).clamp(0.0, 1.0);
        &self.values[k] * real(1.0 - w) + &self.values[k + 1] * real(w)
    }
}

fn check_grid(x: &[f64], what: &str) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(format!("{what} needs at least two nodes")));
    }
    if x[0] != 0.0 || *x.last().unwrap() != 1.0 {
        return Err(Error::InvalidArgument(format!("{what} must start at 0 and end at 1")));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Uniform grid with `n` intervals.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    x[n] = 1.0;
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvpProblem {
    pub pencil: PencilSpec,
    pub u0: CVec,
    pub u1: CVec,
    pub f: Forcing,
    pub x_grid: Vec<f64>,
    /// Integrability exponent; carried as metadata.
    pub p: f64,
}

impl BvpProblem {
    pub fn new(pencil: PencilSpec, u0: CVec, u1: CVec, f: Forcing, x_grid: Vec<f64>, p: f64) -> Result<Self> {
        let n = pencil.dim();
        for len in [u0.len(), u1.len(), f.dim()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        if f.values.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.values.iter().map(|v| v.len()).find(|&l| l != n).unwrap_or(0),
            });
        }
        check_grid(&x_grid, "x grid")?;
        if !(p > 1.0) {
            return Err(Error::InvalidArgument(format!("p must exceed 1, got {p}")));
        }
        Ok(BvpProblem {
            pencil,
            u0,
            u1,
            f,
            x_grid,
            p,
        })
    }

    pub fn dim(&self) -> usize {
        self.pencil.dim()
    }
}

/// Which sign the sixth term of the formula is evaluated with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SixthTerm {
    /// `-K(Z₂-Z₁)^{-1} e^{-(1-x)Z₁} ∫₀¹ e^{(1-s)Z₂} f(s) ds`, the sign that
    /// reproduces the boundary values.
    #[default]
    Corrected,
    /// `+K(Z₂-Z₁)^{-1} e^{-(1-x)Z₁} ∫₀¹ e^{-(1-s)Z₂} f(s) ds`.
    AsPrinted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityNorms {
    /// `sup_x ‖Z₁² e^{-xZ₁} u₀‖` over the grid.
    pub sup_u0: f64,
    pub sup_u1: f64,
    /// Trapezoidal discrete `L^p` norms of the same functions.
    pub lp_u0: f64,
    pub lp_u1: f64,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvpSolution {
    pub x: Vec<f64>,
    pub u: Vec<CVec>,
    /// Centered-difference residual at interior nodes; `None` when the
    /// grid is not uniform with at least five nodes.
    pub residual_ode: Option<f64>,
    /// `(‖u(0) - u₀‖, ‖u(1) - u₁‖)`.
    pub residual_bc: (f64, f64),
    pub compatibility: Option<CompatibilityNorms>,
    pub sixth_term: Option<SixthTerm>,
    pub convention: Option<Convention>,
}

impl BvpSolution {
    /// `max_k ‖u_k - v_k‖` against another solution on the same grid.
    pub fn max_difference(&self, other: &BvpSolution) -> Result<f64> {
        if self.x.len() != other.x.len() || self.x.iter().zip(&other.x).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::InvalidArgument("solutions live on different grids".into()));
        }
        Ok(self
            .u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Default per-panel rule for the forcing integrals: 4-point Gauss–Legendre.
pub fn default_panel_rule() -> QuadratureRule {
    QuadratureRule::gauss_legendre(4)
}

fn merged_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    all
}

/// The three forcing integrals, each on the merged breakpoints:
/// `J(x) = ∫₀ˣ e^{(x-s)Z₂} f`, `R(x) = ∫ₓ¹ e^{-(s-x)Z₁} f`, and for the
/// printed sixth term `∫₀¹ e^{-(1-s)Z₂} f`.
struct ForcingIntegrals {
    j: Vec<CVec>,
    r: Vec<CVec>,
    printed: Option<CVec>,
}

fn forcing_integrals(
    prob: &BvpProblem,
    rule: &QuadratureRule,
    e2: &PropagatorCache,
    e1: &PropagatorCache,
    want_printed: bool,
) -> Result<ForcingIntegrals> {
    let n = prob.dim();
    let pts = merged_breakpoints(&prob.f.x, &prob.x_grid);
    let panels = pts.len() - 1;
    let on_grid: Vec<usize> = prob
        .x_grid
        .iter()
        .map(|&x| pts.partition_point(|&t| t < x - 1e-15))
        .collect();

    // forward: J(x_{k+1}) = e^{hZ₂} J(x_k) + ∫_{x_k}^{x_{k+1}} e^{(x_{k+1}-s)Z₂} f
    let mut j = vec![CVec::zeros(n); pts.len()];
    for k in 0..panels {
        let h = pts[k + 1] - pts[k];
        let mut acc = e2.get(h)?.apply(&j[k]);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let fs = prob.f.at(pts[k] + t * h);
            acc += e2.get((1.0 - t) * h)?.apply(&fs) * real(w * h);
        }
        j[k + 1] = acc;
    }
    // backward: R(x_k) = e^{-hZ₁} R(x_{k+1}) + ∫_{x_k}^{x_{k+1}} e^{-(s-x_k)Z₁} f
    let mut r = vec![CVec::zeros(n); pts.len()];
    for k in (0..panels).rev() {
        let h = pts[k + 1] - pts[k];
        let mut acc = e1.get(h)?.apply(&r[k + 1]);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let fs = prob.f.at(pts[k] + t * h);
            acc += e1.get(t * h)?.apply(&fs) * real(w * h);
        }
        r[k] = acc;
    }
    let printed = if want_printed {
        let neg_z2 = -e2.generator();
        let grow = PropagatorCache::new(neg_z2, 1.0)?;
        let mut g = CVec::zeros(n);
        for k in 0..panels {
            let h = pts[k + 1] - pts[k];
            let mut acc = grow.get(h)?.apply(&g);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let fs = prob.f.at(pts[k] + t * h);
                acc += grow.get((1.0 - t) * h)?.apply(&fs) * real(w * h);
            }
            g = acc;
        }
        Some(g)
    } else {
        None
    };
    Ok(ForcingIntegrals {
        j: on_grid.iter().map(|&i| j[i].clone()).collect(),
        r: on_grid.iter().map(|&i| r[i].clone()).collect(),
        printed,
    })
}

/// Evaluates the explicit formula on `prob.x_grid` with the corrected
/// sixth term.
pub fn solve_bvp(prob: &BvpProblem, fact: &Factorization, rule: &QuadratureRule) -> Result<BvpSolution> {
    solve_bvp_with(prob, fact, rule, SixthTerm::Corrected, Exec::default())
}

pub fn solve_bvp_with(
    prob: &BvpProblem,
    fact: &Factorization,
    rule: &QuadratureRule,
    sixth: SixthTerm,
    exec: Exec,
) -> Result<BvpSolution> {
    let n = prob.dim();
    fact.z1.check_dim(n)?;
    rule.validate()?;
    let e2 = PropagatorCache::new(fact.z2.clone(), 1.0)?;
    let e1 = PropagatorCache::new(fact.z1.clone(), -1.0)?;
    let d_inv = fact.difference_inverse()?;
    let gap = CMat::identity(n, n) - crate::matfun::expm(&(&fact.z2 - &fact.z1))?.into_matrix();
    let k_mat = linalg::inverse_guarded(&gap, 1e-12)?;

    let ints = forcing_integrals(prob, rule, &e2, &e1, sixth == SixthTerm::AsPrinted)?;
    let last = prob.x_grid.len() - 1;
    let i1 = ints.r[0].clone();
    let i2 = ints.j[last].clone();
    let exp_z2 = e2.get(1.0)?;
    let exp_neg_z1 = e1.get(1.0)?;
    let a = exp_neg_z1.apply(&(&prob.u1 - d_inv.apply(&i2)));
    let b = exp_z2.apply(&(&prob.u0 - d_inv.apply(&i1)));
    let left = &prob.u0 - &a;
    let right = &prob.u1 - &b;
    let sixth_vec = match sixth {
        SixthTerm::Corrected => -&i2,
        SixthTerm::AsPrinted => ints.printed.clone().expect("computed for the printed variant"),
    };

    let k = LinOp::new(k_mat)?;
    let u = exec.try_map(prob.x_grid.len(), |idx| -> Result<CVec> {
        let x = prob.x_grid[idx];
        let ex2 = e2.get(x)?;
        let ex1 = e1.get(1.0 - x)?;
        let boundary = ex2.apply(&left) + ex1.apply(&right);
        let corrections = ex2.apply(&i1) * real(-1.0) + ex1.apply(&sixth_vec);
        let particular = &ints.j[idx] + &ints.r[idx];
        Ok(k.apply(&(boundary + d_inv.apply(&corrections))) + d_inv.apply(&particular))
    })?;

    let mut sol = BvpSolution {
        x: prob.x_grid.clone(),
        u,
        residual_ode: None,
        residual_bc: (0.0, 0.0),
        compatibility: Some(compatibility_report(fact, &prob.u0, &prob.u1, &prob.x_grid, prob.p)?),
        sixth_term: Some(sixth),
        convention: Some(fact.convention),
    };
    fill_residuals(&mut sol, prob);
    Ok(sol)
}

fn fill_residuals(sol: &mut BvpSolution, prob: &BvpProblem) {
    match residual_check(sol, prob) {
        Ok((ode, bc)) => {
            sol.residual_ode = Some(ode);
            sol.residual_bc = bc;
        }
        Err(_) => {
            sol.residual_bc = boundary_residual(sol, prob);
        }
    }
}

fn boundary_residual(sol: &BvpSolution, prob: &BvpProblem) -> (f64, f64) {
    (
        (&sol.u[0] - &prob.u0).norm(),
        (sol.u.last().expect("non-empty") - &prob.u1).norm(),
    )
}

/// Block finite differences on a uniform grid with `n_x` interior nodes:
/// centered stencils for `u''` and `u'`, Dirichlet data eliminated, one
/// block tridiagonal solve.
pub fn direct_solve(prob: &BvpProblem, n_x: usize) -> Result<BvpSolution> {
    if n_x < 3 {
        return Err(Error::InvalidArgument(format!("direct_solve needs n_x >= 3, got {n_x}")));
    }
    let n = prob.dim();
    let h = 1.0 / (n_x + 1) as f64;
    let x = uniform_grid(n_x + 1);
    let eye = CMat::identity(n, n);
    let b = prob.pencil.b.matrix();
    let c = prob.pencil.c.matrix();
    // row: (u_{k+1} - 2u_k + u_{k-1})/h² - B(u_{k+1} - u_{k-1})/h - C u_k = f_k
    let lower_block = &eye * real(1.0 / (h * h)) + b * real(1.0 / h);
    let upper_block = &eye * real(1.0 / (h * h)) - b * real(1.0 / h);
    let diag_block = &eye * real(-2.0 / (h * h)) - c;
    let mut rhs: Vec<CVec> = (1..=n_x).map(|k| prob.f.at(x[k])).collect();
    rhs[0] -= &lower_block * &prob.u0;
    rhs[n_x - 1] -= &upper_block * &prob.u1;
    let interior = linalg::block_tridiagonal_solve(
        &vec![lower_block; n_x - 1],
        &vec![diag_block; n_x],
        &vec![upper_block; n_x - 1],
        &rhs,
    )?;
    let mut u = Vec::with_capacity(n_x + 2);
    u.push(prob.u0.clone());
    u.extend(interior);
    u.push(prob.u1.clone());
    let mut sol = BvpSolution {
        x,
        u,
        residual_ode: None,
        residual_bc: (0.0, 0.0),
        compatibility: None,
        sixth_term: None,
        convention: None,
    };
    fill_residuals(&mut sol, prob);
    Ok(sol)
}

/// `max_k ‖D²u - 2B·Du - Cu - f‖` over interior nodes with centered
/// differences, and the boundary residuals. Needs a uniform grid with at
/// least five nodes.
pub fn residual_check(sol: &BvpSolution, prob: &BvpProblem) -> Result<(f64, (f64, f64))> {
    let m = sol.x.len();
    if m < 5 || sol.u.len() != m {
        return Err(Error::InvalidArgument("residual check needs at least five nodes".into()));
    }
    let h = sol.x[1] - sol.x[0];
    if sol.x.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidArgument("residual check needs a uniform grid".into()));
    }
    let mut worst: f64 = 0.0;
    for k in 1..m - 1 {
        let d2 = (&sol.u[k + 1] - &sol.u[k] * real(2.0) + &sol.u[k - 1]) * real(1.0 / (h * h));
        let d1 = (&sol.u[k + 1] - &sol.u[k - 1]) * real(1.0 / (2.0 * h));
        let r = d2 - prob.pencil.b.apply(&d1) * real(2.0) - prob.pencil.c.apply(&sol.u[k]) - prob.f.at(sol.x[k]);
        worst = worst.max(r.norm());
    }
    Ok((worst, boundary_residual(sol, prob)))
}

/// Sup and discrete `L^p` norms of `x ↦ Z₁² e^{-xZ₁} u₀` and the same for
/// `u₁` on the grid. Always finite for matrices, so the solvability
/// condition is automatic here.
pub fn compatibility_report(fact: &Factorization, u0: &CVec, u1: &CVec, x_grid: &[f64], p: f64) -> Result<CompatibilityNorms> {
    check_grid(x_grid, "x grid")?;
    let z1_sq = fact.z1.square();
    let cache = PropagatorCache::new(fact.z1.clone(), -1.0)?;
    let mut g0 = Vec::with_capacity(x_grid.len());
    let mut g1 = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let e = &z1_sq * &cache.get(x)?;
        g0.push(e.apply(u0).norm());
        g1.push(e.apply(u1).norm());
    }
    let lp = |g: &[f64]| -> f64 {
        let s: f64 = x_grid
            .windows(2)
            .zip(g.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0].powf(p) + v[1].powf(p)))
            .sum();
        s.powf(1.0 / p)
    };
    let sup = |g: &[f64]| g.iter().copied().fold(0.0, f64::max);
    Ok(CompatibilityNorms {
        sup_u0: sup(&g0),
        sup_u1: sup(&g1),
        lp_u0: lp(&g0),
        lp_u1: lp(&g1),
        p,
    })
}

/// Outcome of solving a probe problem with both sixth-term signs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SixthTermReport {
    pub chosen: SixthTerm,
    pub corrected_boundary_error: f64,
    pub printed_boundary_error: f64,
    pub corrected_ode_residual: f64,
    pub printed_ode_residual: f64,
}

/// Solves `u'' - 2Bu' - Cu = 1` (all components one) with zero boundary
/// data on a uniform grid of `intervals` panels under both signs, and
/// keeps the one whose boundary and interior residuals are smaller.
pub fn adjudicate_sixth_term(pencil: &PencilSpec, fact: &Factorization, intervals: usize) -> Result<SixthTermReport> {
    let n = pencil.dim();
    let ones = CVec::from_element(n, real(1.0));
    let grid = uniform_grid(intervals.max(4));
    let probe = BvpProblem::new(
        pencil.clone(),
        CVec::zeros(n),
        CVec::zeros(n),
        Forcing::new(vec![0.0, 1.0], vec![ones.clone(), ones])?,
        grid,
        2.0,
    )?;
    let rule = default_panel_rule();
    let corrected = solve_bvp_with(&probe, fact, &rule, SixthTerm::Corrected, Exec::default())?;
    let (printed_bc, printed_ode) = match solve_bvp_with(&probe, fact, &rule, SixthTerm::AsPrinted, Exec::default()) {
        Ok(s) => (s.residual_bc.0.max(s.residual_bc.1), s.residual_ode.unwrap_or(f64::INFINITY)),
        // the printed kernel grows like e^{-(1-s)Z₂} and may overflow
        Err(Error::Overflow { .. }) => (f64::INFINITY, f64::INFINITY),
        Err(e) => return Err(e),
    };
    let corrected_bc = corrected.residual_bc.0.max(corrected.residual_bc.1);
    let corrected_ode = corrected.residual_ode.unwrap_or(f64::INFINITY);
    let chosen = if corrected_bc + corrected_ode <= printed_bc + printed_ode {
        SixthTerm::Corrected
    } else {
        SixthTerm::AsPrinted
    };
    Ok(SixthTermReport {
        chosen,
        corrected_boundary_error: corrected_bc,
        printed_boundary_error: printed_bc,
        corrected_ode_residual: corrected_ode,
        printed_ode_residual: printed_ode,
    })
}
