//! Subcommand dispatch. Every command produces a [`RunReport`]; numeric
//! failures land in the report, only unreadable input exits with 2.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use qpencil::bvp::{adjudicate_sixth_term, direct_solve, solve_bvp, uniform_grid, BvpProblem};
use qpencil::io::{self, BvpFile, OperatorFile, PencilFile};
use qpencil::operator_core::{
    accretivity_margin, is_accretive, kernel_equality_check, numerical_range, sector_test, spectral_inclusion_check,
    Sector, DEFAULT_RANGE_SAMPLES, MARGIN_RTOL,
};
use qpencil::pde_example::{manufactured, solve_example, verify_claims, ClaimReport, ConventionChoice, PdeCoefficients, PdeData};
use qpencil::pencil::{
    build_lambda, check_c1, check_c3, check_c4_c5, default_t_grid, eigenvalue_localization_check, estimate_c2,
    factorize, kernel_identity_z1, kernel_inclusion_lambda, ordered_residual, symmetrized_residual, Convention,
    ConditionC1Params, Factorization, PencilSpec,
};
use qpencil::report::ConditionReport;
use qpencil::semigroup::{contraction_check, holomorphic_sector_check, quasi_sectorial_check, PolarGrid, DEFAULT_T_SAMPLES};
use qpencil::{fixtures, real, LinOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Factorize,
    Numrange,
    Semigroup,
    Solve,
    PdeExample,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub convention: ConventionChoice,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

const FACTOR_RTOL: f64 = 1e-10;
const BOUNDARY_RTOL: f64 = 1e-8;
const LAMBDA_SAMPLES: usize = 100;
const OMEGA_RANGE_SAMPLES: usize = 180;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// A check together with the outcome the input file asked for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    #[serde(flatten)]
    pub report: ConditionReport,
    /// Outcome declared in the input's `expect` map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<bool>,
    /// `pass == expected`; without a declaration, a check whose
    /// hypothesis is unmet never counts as a failure.
    pub ok: bool,
}

impl CheckEntry {
    fn new(report: ConditionReport, expect: &BTreeMap<String, bool>) -> Self {
        let expected = expect.get(&report.condition).copied();
        let ok = match expected {
            Some(e) => report.pass == e,
            None => report.pass || !report.hypothesis_met,
        };
        CheckEntry { report, expected, ok }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub seed: u64,
    pub status: Status,
    pub checks: Vec<CheckEntry>,
    #[serde(default)]
    pub results: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Pass => EXIT_PASS,
            Status::Fail | Status::Error => EXIT_FAIL,
        }
    }
}

/// Any input file may carry `"expect": {"condition": bool}`.
#[derive(Deserialize)]
struct WithExpect<T> {
    #[serde(flatten)]
    inner: T,
    #[serde(default)]
    expect: BTreeMap<String, bool>,
}

struct Outcome {
    checks: Vec<ConditionReport>,
    results: Value,
    csv: Option<String>,
}

pub fn run(config: &RunConfig) -> u8 {
    match execute(config) {
        Ok(report) => report.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

/// Loads the input and runs the command. `Err` means unusable input or an
/// output that could not be written.
pub fn execute(config: &RunConfig) -> anyhow::Result<RunReport> {
    let path = config
        .input
        .as_deref()
        .context("missing --input (or --config for pde-example)")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (outcome, expect) = match config.command {
        Command::Check => {
            let (p, expect) = load_pencil(&text, path)?;
            (check(&p, config), expect)
        }
        Command::Factorize => {
            let (p, expect) = load_pencil(&text, path)?;
            (factorize_cmd(&p, config), expect)
        }
        Command::Numrange => {
            let (a, expect) = load_operator(&text, path)?;
            (numrange(&a, config), expect)
        }
        Command::Semigroup => {
            let (a, expect) = load_operator(&text, path)?;
            (semigroup(&a, config), expect)
        }
        Command::Solve => {
            let f: WithExpect<BvpFile> = parse(&text, path)?;
            let mut prob = BvpProblem::try_from(&f.inner).with_context(|| format!("{}: invalid problem", path.display()))?;
            if let Some(n) = config.grid {
                prob.x_grid = uniform_grid(n);
            }
            (solve(&prob, config), f.expect)
        }
        Command::PdeExample => {
            let f: WithExpect<PdeCoefficients> = parse(&text, path)?;
            let mut c = f.inner;
            if let Some(n) = config.grid {
                c.n_y = n;
            }
            c.validate().with_context(|| format!("{}: invalid coefficients", path.display()))?;
            (pde_example(&c, config), f.expect)
        }
    };
    let report = match outcome {
        Ok(o) => {
            if let (Some(out), Some(csv)) = (&config.out, &o.csv) {
                fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
            }
            let checks: Vec<CheckEntry> = o.checks.into_iter().map(|r| CheckEntry::new(r, &expect)).collect();
            let status = if checks.iter().all(|c| c.ok) { Status::Pass } else { Status::Fail };
            RunReport {
                command: config.command,
                seed: config.seed,
                status,
                checks,
                results: o.results,
                error: None,
            }
        }
        Err(e) => RunReport {
            command: config.command,
            seed: config.seed,
            status: Status::Error,
            checks: Vec::new(),
            results: Value::Null,
            error: Some(e.to_string()),
        },
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &config.report {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(report)
}

fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> anyhow::Result<T> {
    // serde_json errors carry the line and column; field errors name the field
    serde_json::from_str(text).with_context(|| format!("{}: schema error", path.display()))
}

fn load_pencil(text: &str, path: &Path) -> anyhow::Result<(PencilSpec, BTreeMap<String, bool>)> {
    let f: WithExpect<PencilFile> = parse(text, path)?;
    let p = PencilSpec::try_from(&f.inner).with_context(|| format!("{}: invalid pencil", path.display()))?;
    Ok((p, f.expect))
}

fn load_operator(text: &str, path: &Path) -> anyhow::Result<(LinOp, BTreeMap<String, bool>)> {
    let f: WithExpect<OperatorFile> = parse(text, path)?;
    let a = LinOp::try_from(&f.inner).with_context(|| format!("{}: invalid operator", path.display()))?;
    Ok((a, f.expect))
}

fn sector_report(name: &str, a: &LinOp, half_angle: f64) -> qpencil::Result<ConditionReport> {
    let v = sector_test(a, &Sector::at_origin(half_angle)?);
    Ok(ConditionReport::exact(name, v.margin, MARGIN_RTOL * a.norm().max(f64::MIN_POSITIVE)).with_param("half_angle", half_angle))
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn check(p: &PencilSpec, config: &RunConfig) -> qpencil::Result<Outcome> {
    let b2 = p.b.square();
    let mut checks = vec![
        sector_report("B_sector_pi_4", &p.b, FRAC_PI_4)?,
        sector_report("B2_right_half_plane", &b2, FRAC_PI_2)?,
        check_c4_c5(p),
        build_lambda(p).1,
    ];
    let c2 = estimate_c2(p, &default_t_grid(p))?;
    checks.push(c2.report.clone());
    if c2.b_est < 1.0 {
        // the constants (C.2) hands to (C.1)
        let params = ConditionC1Params::new(c2.a_est / 2.0, (c2.b_est + 1.0) / 2.0, 0.0)?;
        checks.push(check_c1(p, params, config.samples.unwrap_or(1000), config.seed));
    }
    checks.push(check_c3(p, 1.0)?);
    checks.push(kernel_inclusion_lambda(p, FRAC_PI_4));
    checks.push(eigenvalue_localization_check(p)?);

    let (herm, _) = qpencil::operator_core::hermitian_split(&p.b);
    let n = p.dim();
    let e1_form = if n > 0 { b2[(0, 0)] } else { real(0.0) };
    let results = json!({
        "dim": n,
        "b_hermitian_part": OperatorFile::from(&herm),
        "b2_e1_form": pair(e1_form),
        "c2_estimate": {"a": c2.a_est, "b": c2.b_est, "b_lin": c2.b_lin, "t_star": c2.t_star},
    });
    Ok(Outcome { checks, results, csv: None })
}

/// `Auto` prefers `Z = B ± Λ^{1/2}` and falls back to the rotated
/// placement when that fails or leaves a larger ordered residual.
fn choose_factorization(p: &PencilSpec, choice: ConventionChoice) -> qpencil::Result<Factorization> {
    match choice {
        ConventionChoice::Real => factorize(p, Convention::RealRoot),
        ConventionChoice::Rotated => factorize(p, Convention::RotatedRoot),
        ConventionChoice::Auto => match (factorize(p, Convention::RealRoot), factorize(p, Convention::RotatedRoot)) {
            (Ok(r), Ok(t)) => {
                let zero = real(0.0);
                Ok(if ordered_residual(&t, p, zero) < ordered_residual(&r, p, zero) { t } else { r })
            }
            (Ok(r), Err(_)) => Ok(r),
            (Err(_), Ok(t)) => Ok(t),
            (Err(e), Err(_)) => Err(e),
        },
    }
}

fn factorize_cmd(p: &PencilSpec, config: &RunConfig) -> qpencil::Result<Outcome> {
    let f = choose_factorization(p, config.convention)?;
    let tol = config.tol.unwrap_or(FACTOR_RTOL);
    let samples = config.samples.unwrap_or(LAMBDA_SAMPLES);
    let (nb, nc) = (p.b.norm(), p.c.norm());
    let mut rng = fixtures::rng(config.seed);
    let radius = 1.0 + nb;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let lambda = fixtures::gaussian(&mut rng) * radius;
        let scale = lambda.norm_sqr() + nb * nb + nc;
        worst = worst.max(symmetrized_residual(&f, p, lambda) / scale.max(f64::MIN_POSITIVE));
    }
    let identity = ConditionReport::sampled("factorization_identity", -worst, tol, samples, config.seed)
        .with_note("relative to |lambda|^2 + |B|^2 + |C|");

    let scale0 = p.scale_at(real(0.0)).max(f64::MIN_POSITIVE);
    let ordered = ordered_residual(&f, p, real(0.0)) / scale0;
    let commuting = f.commutator_norm <= tol * scale0;
    let mut ordered_report = ConditionReport::exact("ordered_factorization", -ordered, tol)
        .with_param("commutator_norm", f.commutator_norm)
        .with_hypothesis(commuting);
    if !commuting {
        ordered_report = ordered_report.with_note("hypothesis unmet: B and the root do not commute");
    }
    let checks = vec![identity, ordered_report, kernel_identity_z1(&f, p, FRAC_PI_4)];
    let results = json!({
        "convention": f.convention,
        "root_target": f.root_target,
        "commutator_norm": f.commutator_norm,
        "lambda_margin": f.lambda_margin,
        "defective_lambda": f.defective_lambda,
        "root": OperatorFile::from(&f.root),
        "z1": OperatorFile::from(&f.z1),
        "z2": OperatorFile::from(&f.z2),
    });
    Ok(Outcome { checks, results, csv: None })
}

fn numrange(a: &LinOp, config: &RunConfig) -> qpencil::Result<Outcome> {
    let m = config.samples.unwrap_or(DEFAULT_RANGE_SAMPLES);
    let range = numerical_range(a, m)?;
    let mut csv = String::from("angle,support,re_z,im_z\n");
    for ((t, h), z) in range.angles.iter().zip(&range.support_values).zip(&range.boundary_points) {
        csv.push_str(&format!("{t:e},{h:e},{:e},{:e}\n", z.re, z.im));
    }
    let (inclusion, _) = spectral_inclusion_check(a, m)?;
    let tol = MARGIN_RTOL * a.norm().max(f64::MIN_POSITIVE) + 1e-14;
    let kernels = kernel_equality_check(a);
    let accretive = is_accretive(a);
    let mut kernel_report = ConditionReport::exact("kernel_equality", kernels.margin, 0.0)
        .with_param("kernel_dim", kernels.kernel_dim as f64)
        .with_param("adjoint_kernel_dim", kernels.adjoint_kernel_dim as f64)
        .with_hypothesis(accretive.pass);
    if !accretive.pass {
        kernel_report = kernel_report.with_note("hypothesis unmet: operator is not accretive");
    }
    let checks = vec![
        ConditionReport::exact("spectral_inclusion", inclusion.margin, tol).with_param("range_samples", m as f64),
        kernel_report,
    ];
    let results = json!({
        "range_samples": m,
        "accretivity_margin": accretivity_margin(a),
        "accretive": accretive.pass,
        "convexity_defect": range.convexity_defect(),
    });
    Ok(Outcome { checks, results, csv: Some(csv) })
}

/// Smallest half-angle of a sector at the origin holding the sampled
/// boundary of `W(T)`; `π/2` when the range leaves the open right half-plane.
fn sector_angle(a: &LinOp, m: usize) -> qpencil::Result<f64> {
    let range = numerical_range(a, m)?;
    let mut omega: f64 = 0.0;
    for z in &range.boundary_points {
        if z.re <= 0.0 {
            return Ok(FRAC_PI_2);
        }
        omega = omega.max(z.im.atan2(z.re).abs());
    }
    Ok((omega + 1e-9).min(FRAC_PI_2))
}

fn semigroup(a: &LinOp, config: &RunConfig) -> qpencil::Result<Outcome> {
    let m = config.samples.unwrap_or(OMEGA_RANGE_SAMPLES);
    let omega = sector_angle(a, DEFAULT_RANGE_SAMPLES)?;
    let worst = contraction_check(a, &DEFAULT_T_SAMPLES)?;
    let accretive = is_accretive(a).pass;
    let mut contraction = ConditionReport::exact("contraction", 1.0 - worst, 1e-12)
        .with_param("worst_norm", worst)
        .with_hypothesis(accretive);
    if !accretive {
        contraction = contraction.with_note("hypothesis unmet: generator is not accretive");
    }
    let checks = vec![
        contraction,
        holomorphic_sector_check(a, omega, &PolarGrid::default())?,
        quasi_sectorial_check(a, omega, &DEFAULT_T_SAMPLES, m)?,
    ];
    let results = json!({"omega": omega, "t_samples": DEFAULT_T_SAMPLES, "range_samples": m});
    Ok(Outcome { checks, results, csv: None })
}

fn solve(prob: &BvpProblem, config: &RunConfig) -> qpencil::Result<Outcome> {
    let f = choose_factorization(&prob.pencil, config.convention)?;
    let sol = solve_bvp(prob, &f, &qpencil::bvp::default_panel_rule())?;
    let tol = config.tol.unwrap_or(BOUNDARY_RTOL);
    let scale = prob.u0.norm().max(prob.u1.norm()).max(1.0);
    let bc = sol.residual_bc.0.max(sol.residual_bc.1);
    let boundary = ConditionReport::exact("boundary_values", -bc / scale, tol)
        .with_param("residual_u0", sol.residual_bc.0)
        .with_param("residual_u1", sol.residual_bc.1);
    let sixth = adjudicate_sixth_term(&prob.pencil, &f, 32)?;
    let intervals = prob.x_grid.len() - 1;
    let uniform = intervals >= 4 && prob.x_grid.windows(2).all(|w| ((w[1] - w[0]) * intervals as f64 - 1.0).abs() < 1e-9);
    let direct = if uniform { Some(sol.max_difference(&direct_solve(prob, intervals - 1)?)?) } else { None };
    let results = json!({
        "convention": f.convention,
        "root_target": f.root_target,
        "nodes": sol.x.len(),
        "residual_ode": sol.residual_ode,
        "direct_difference": direct,
        "sixth_term": sixth,
        "compatibility": sol.compatibility,
    });
    Ok(Outcome {
        checks: vec![boundary],
        results,
        csv: Some(io::bvp_solution_csv(&sol)),
    })
}

fn claim_to_condition(c: &ClaimReport) -> ConditionReport {
    let mut r = ConditionReport::exact(format!("claim_{}", c.claim), c.margin, c.tolerance).with_hypothesis(c.hypothesis_met);
    r.pass = c.pass;
    r.parameters = c.parameters.clone();
    r.notes = c.notes.clone();
    r.with_param("n_y", c.n_y as f64)
}

fn pde_example(c: &PdeCoefficients, config: &RunConfig) -> qpencil::Result<Outcome> {
    let claims = verify_claims(c)?;
    let mut checks: Vec<ConditionReport> = claims.iter().map(claim_to_condition).collect();
    let bounds = qpencil::pde_example::compute_bounds(c)?;
    let (forcing, exact) = manufactured(c, bounds.gamma);
    let n_x = c.n_y + 1;
    let data = PdeData::from_fn(c, n_x, forcing, |y| real((PI * y).sin()), |y| real(-(PI * y).sin()));
    let sol = solve_example(c, &data, config.convention)?;
    let adj = &sol.adjudication;
    checks.push(
        ConditionReport::exact("single_factoring_branch", if adj.factoring_branches == 1 { 0.0 } else { -1.0 }, 0.0)
            .with_param("factoring_branches", adj.factoring_branches as f64)
            .with_param("threshold", adj.threshold),
    );
    let exact = &exact;
    let error = sol
        .x
        .iter()
        .zip(&sol.formula)
        .flat_map(|(&x, u)| sol.y.iter().zip(u.iter()).map(move |(&y, z)| (z - exact(x, y)).norm()))
        .fold(0.0, f64::max);
    let results = json!({
        "claims": claims,
        "bounds": bounds,
        "adjudication": adj,
        "used": sol.used,
        "n_x": n_x,
        "n_y": c.n_y,
        "max_discrepancy": sol.max_discrepancy,
        "max_error_manufactured": error,
        "residual_bc": [sol.residual_bc.0, sol.residual_bc.1],
    });
    Ok(Outcome {
        checks,
        results,
        csv: Some(io::pde_solution_csv(&sol)),
    })
}
