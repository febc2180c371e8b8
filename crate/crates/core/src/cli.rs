//! End-to-end pipeline behind the `koopman` binary: solve a configured
//! system, sweep expansion orders, and run the self-validation suite.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::BasisSet;
use crate::dynamics::{duffing_vector_field, parse_system_config, rescale_to_unit_box, SystemSpec, VectorField};
use crate::error::{KoopmanError, Result};
use crate::fixtures;
use crate::koopman::{assemble_koopman, observable_matrix, KoopmanModel, NamedObservable, ObservableSet, Trajectory};
use crate::polyalg::{affine_substitute, box_inner_product, canonicalize, Monomial, Polynomial};
use crate::refinteg::{gauss_legendre_inner_product, rk4_integrate, ReferenceTrajectory};

pub const DEFAULT_RK_STEP: f64 = 1e-4;
pub const DEFAULT_OUT_DIR: &str = "out";

/// Box-exit slack for trajectories that start on the boundary.
const BOX_EXIT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableError {
    pub name: String,
    pub max_abs: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub basis_s: f64,
    pub assembly_s: f64,
    pub eigen_s: f64,
    pub propagate_s: f64,
    pub reference_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub system: String,
    pub m: usize,
    pub c: usize,
    pub n: usize,
    pub eigenvalues: Vec<[f64; 2]>,
    pub eigenresidual: f64,
    pub eigencondition: f64,
    pub skewness: f64,
    pub max_imag: f64,
    pub errors: Option<Vec<ObservableError>>,
    pub max_error: Option<f64>,
    pub first_box_exit_time: Option<f64>,
    pub warnings: Vec<String>,
    pub timings: StageTimings,
}

/// Reference values and absolute errors, indexed `[observable][time]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub reference: Vec<Vec<f64>>,
    pub error: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub names: Vec<String>,
    pub trajectory: Trajectory,
    pub comparison: Option<Comparison>,
    pub summary: RunSummary,
}

impl Solution {
    /// Trajectory CSV: `t,<names>[,<name>_ref...,<name>_err...]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        if self.comparison.is_some() {
            for suffix in ["_ref", "_err"] {
                for n in &self.names {
                    out.push(',');
                    out.push_str(n);
                    out.push_str(suffix);
                }
            }
        }
        out.push('\n');
        for (k, &t) in self.trajectory.times.iter().enumerate() {
            out.push_str(&format_number(t));
            let mut push_col = |col: &[Vec<f64>]| {
                for series in col {
                    out.push(',');
                    out.push_str(&format_number(series[k]));
                }
            };
            push_col(&self.trajectory.values);
            if let Some(cmp) = &self.comparison {
                push_col(&cmp.reference);
                push_col(&cmp.error);
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }
}

/// Shortest round-trip decimal; exponent form for very small or large magnitudes.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn seconds_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

/// Observables rewritten in unit-box coordinates `y = (x - center) / half_width`.
fn observables_in_unit_box(spec: &SystemSpec) -> Result<ObservableSet> {
    let items = spec
        .observable_set()
        .items()
        .iter()
        .map(|o| {
            Ok(NamedObservable::new(
                o.name.clone(),
                affine_substitute(&o.poly, &spec.domain_center, &spec.domain_half_width)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ObservableSet::new(items)
}

/// Map a state into unit-box coordinates.
pub fn unit_box_point(spec: &SystemSpec, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != spec.dim() {
        return Err(KoopmanError::DimensionMismatch {
            expected: spec.dim(),
            found: x.len(),
        });
    }
    Ok(x.iter()
        .zip(spec.domain_center.iter().zip(&spec.domain_half_width))
        .map(|(x, (c, h))| (x - c) / h)
        .collect())
}

/// Koopman model of a configured system in unit-box coordinates, projecting
/// the configured observables. Feed it states from [`unit_box_point`].
pub fn build_model(spec: &SystemSpec) -> Result<KoopmanModel> {
    let basis = BasisSet::new(spec.order, spec.dim())?;
    let g = rescale_to_unit_box(&spec.vf, &spec.domain_center, &spec.domain_half_width)?;
    KoopmanModel::build(basis, &g, &observables_in_unit_box(spec)?)
}

/// Evaluate the configured observables along a reference trajectory.
pub fn reference_observables(spec: &SystemSpec, reference: &ReferenceTrajectory) -> Result<Vec<Vec<f64>>> {
    spec.observable_set()
        .items()
        .iter()
        .map(|o| reference.states.iter().map(|s| o.poly.evaluate(s)).collect())
        .collect()
}

pub fn reference_trajectory(spec: &SystemSpec, rk_step: f64) -> Result<ReferenceTrajectory> {
    rk4_integrate(&spec.vf, &spec.initial_state, &spec.time_grid(), rk_step)
}

fn compare(trajectory: &Trajectory, reference: Vec<Vec<f64>>, names: &[String]) -> (Comparison, Vec<ObservableError>) {
    let error: Vec<Vec<f64>> = trajectory
        .values
        .iter()
        .zip(&reference)
        .map(|(ko, rf)| ko.iter().zip(rf).map(|(a, b)| (a - b).abs()).collect())
        .collect();
    let stats = names
        .iter()
        .zip(&error)
        .map(|(name, e)| ObservableError {
            name: name.clone(),
            max_abs: e.iter().fold(0.0f64, |m, &v| m.max(v)),
            rms: (e.iter().map(|v| v * v).sum::<f64>() / e.len().max(1) as f64).sqrt(),
        })
        .collect();
    (Comparison { reference, error }, stats)
}

/// Run the full pipeline for one system. With a reference, errors are
/// `|koopman - rk4|` per observable and time.
pub fn solve_system(spec: &SystemSpec, reference: Option<&ReferenceTrajectory>) -> Result<Solution> {
    let m = spec.dim();
    let mut timings = StageTimings::default();

    let start = Instant::now();
    let basis = BasisSet::new(spec.order, m)?;
    timings.basis_s = seconds_since(start);

    let start = Instant::now();
    let g = rescale_to_unit_box(&spec.vf, &spec.domain_center, &spec.domain_half_width)?;
    let observables = observables_in_unit_box(spec)?;
    let h = observable_matrix(&basis, &observables)?;
    let k = assemble_koopman(&basis, &g)?;
    timings.assembly_s = seconds_since(start);

    let start = Instant::now();
    let names: Vec<String> = observables.names().into_iter().map(String::from).collect();
    let model = KoopmanModel::from_parts(basis, k, h, names.clone())?;
    timings.eigen_s = seconds_since(start);

    let start = Instant::now();
    let times = spec.time_grid();
    let phi0 = model.initial_eigenfunctions(&unit_box_point(spec, &spec.initial_state)?)?;
    let trajectory = model.propagate(&phi0, &times)?;
    let first_box_exit_time = if spec.order >= 1 {
        let coords = observable_matrix(model.basis(), &ObservableSet::identity(&spec.states))?;
        let y = model.propagate_observables(&coords, &phi0, &times)?;
        (0..times.len())
            .find(|&k| y.values.iter().any(|s| s[k].abs() > 1.0 + BOX_EXIT_SLACK))
            .map(|k| times[k])
    } else {
        None
    };
    timings.propagate_s = seconds_since(start);

    let (comparison, errors) = match reference {
        Some(r) => {
            let (cmp, stats) = compare(&trajectory, reference_observables(spec, r)?, &names);
            (Some(cmp), Some(stats))
        }
        None => (None, None),
    };
    let max_error = errors.as_ref().map(|e| e.iter().fold(0.0f64, |m, s| m.max(s.max_abs)));

    let mut warnings = Vec::new();
    if let Some(t) = first_box_exit_time {
        warnings.push(format!("trajectory leaves the unit box at t = {}", format_number(t)));
    }
    let d = model.decomposition();
    let summary = RunSummary {
        system: spec.name.clone(),
        m,
        c: spec.order,
        n: model.basis().len(),
        eigenvalues: d.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        eigenresidual: d.residual,
        eigencondition: d.condition,
        skewness: model.skewness(),
        max_imag: trajectory.max_imag,
        errors,
        max_error,
        first_box_exit_time,
        warnings,
        timings,
    };
    Ok(Solution {
        names,
        trajectory,
        comparison,
        summary,
    })
}

pub fn load_config(path: &Path) -> Result<SystemSpec> {
    let text = fs::read_to_string(path).map_err(|e| KoopmanError::Io(format!("{}: {e}", path.display())))?;
    parse_system_config(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| KoopmanError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| KoopmanError::Io(format!("{}: {e}", dir.display())))
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub reference: bool,
    pub rk_step: f64,
    pub out_dir: PathBuf,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            reference: false,
            rk_step: DEFAULT_RK_STEP,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

/// Paths written by [`run_solve`].
#[derive(Debug, Clone)]
pub struct SolveArtifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub solution: Solution,
}

pub fn run_solve(config: &Path, opts: &SolveOptions) -> Result<SolveArtifacts> {
    let spec = load_config(config)?;
    let mut ref_time = None;
    let reference = if opts.reference {
        let start = Instant::now();
        let r = reference_trajectory(&spec, opts.rk_step)?;
        ref_time = Some(seconds_since(start));
        Some(r)
    } else {
        None
    };
    let mut solution = solve_system(&spec, reference.as_ref())?;
    solution.summary.timings.reference_s = ref_time;

    ensure_dir(&opts.out_dir)?;
    let csv = opts.out_dir.join(format!("{}_trajectory.csv", spec.name));
    let summary = opts.out_dir.join(format!("{}_summary.json", spec.name));
    write_file(&csv, &solution.to_csv())?;
    write_file(&summary, &solution.summary_json())?;
    Ok(SolveArtifacts { csv, summary, solution })
}

/// Parse `A..B` (inclusive) or a comma-separated list.
pub fn parse_orders(text: &str) -> Result<Vec<usize>> {
    let bad = || KoopmanError::InvalidArgument(format!("invalid order list `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let orders = if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if orders.is_empty() {
        return Err(bad());
    }
    Ok(orders)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub order: usize,
    pub n: usize,
    /// `Err` holds the failure message for this order.
    pub outcome: std::result::Result<SweepResult, String>,
    pub wall_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub errors: Vec<ObservableError>,
    pub max_error: f64,
    pub eigenresidual: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Smallest max-error over the orders that succeeded.
    pub fn best_error(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|s| s.max_error))
            .reduce(f64::min)
    }

    pub fn error_at(&self, order: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.order == order)
            .and_then(|r| r.outcome.as_ref().ok().map(|s| s.max_error))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("order,n,status");
        for n in &self.names {
            let _ = write!(out, ",{n}_max_err");
        }
        out.push_str(",eigenresidual,wall_s\n");
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.order, r.n);
            match &r.outcome {
                Ok(s) => {
                    out.push_str(",ok");
                    for e in &s.errors {
                        let _ = write!(out, ",{}", format_number(e.max_abs));
                    }
                    let _ = write!(out, ",{}", format_number(s.eigenresidual));
                }
                Err(_) => {
                    out.push_str(",failed");
                    out.push_str(&",".repeat(self.names.len() + 1));
                }
            }
            let _ = writeln!(out, ",{}", format_number(r.wall_s));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:>5} {:>6}", "order", "n");
        for n in &self.names {
            let _ = write!(out, " {:>12}", format!("{n}_err"));
        }
        let _ = writeln!(out, " {:>12} {:>10}", "eig_resid", "wall_s");
        for r in &self.rows {
            let _ = write!(out, "{:>5} {:>6}", r.order, r.n);
            match &r.outcome {
                Ok(s) => {
                    for e in &s.errors {
                        let _ = write!(out, " {:>12.3e}", e.max_abs);
                    }
                    let _ = write!(out, " {:>12.3e}", s.eigenresidual);
                }
                Err(msg) => {
                    let _ = write!(out, " failed: {msg}");
                }
            }
            let _ = writeln!(out, " {:>10.4}", r.wall_s);
        }
        out
    }
}

/// Solve at each order against one shared RK4 reference.
pub fn sweep_orders(spec: &SystemSpec, orders: &[usize], rk_step: f64) -> Result<SweepReport> {
    if orders.is_empty() {
        return Err(KoopmanError::InvalidArgument("no orders to sweep".into()));
    }
    let reference = reference_trajectory(spec, rk_step)?;
    let names = spec.observable_set().names().into_iter().map(String::from).collect();
    let rows = orders
        .iter()
        .map(|&order| {
            let start = Instant::now();
            let mut s = spec.clone();
            s.order = order;
            let n = crate::basis::basis_size(order, spec.dim()).min(usize::MAX as u128) as usize;
            let outcome = solve_system(&s, Some(&reference))
                .map(|sol| SweepResult {
                    errors: sol.summary.errors.unwrap_or_default(),
                    max_error: sol.summary.max_error.unwrap_or(0.0),
                    eigenresidual: sol.summary.eigenresidual,
                })
                .map_err(|e| e.to_string());
            SweepRow {
                order,
                n,
                outcome,
                wall_s: seconds_since(start),
            }
        })
        .collect();
    Ok(SweepReport { names, rows })
}

#[derive(Debug, Clone)]
pub struct SweepArtifacts {
    pub csv: PathBuf,
    pub report: SweepReport,
}

pub fn run_sweep(config: &Path, orders: &[usize], rk_step: f64, out_dir: &Path) -> Result<SweepArtifacts> {
    let spec = load_config(config)?;
    let report = sweep_orders(&spec, orders, rk_step)?;
    ensure_dir(out_dir)?;
    let csv = out_dir.join(format!("{}_sweep.csv", spec.name));
    write_file(&csv, &report.to_csv())?;
    Ok(SweepArtifacts { csv, report })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        out
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Largest `|<L_i, L_j> - δ_ij|` over the order-`c` basis in `m` variables.
pub fn gram_deviation(c: usize, m: usize) -> Result<f64> {
    let basis = BasisSet::new(c, m)?;
    let p = basis.polynomials();
    let mut worst = 0.0f64;
    for i in 0..p.len() {
        for j in i..p.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((box_inner_product(&p[i], &p[j])? - target).abs());
        }
    }
    Ok(worst)
}

/// Largest relative gap between exact and quadrature Koopman entries.
pub fn quadrature_deviation(basis: &BasisSet, vf: &VectorField) -> Result<f64> {
    let k = assemble_koopman(basis, vf)?;
    let mut worst = 0.0f64;
    for i in 0..basis.len() {
        let d = crate::koopman::total_derivative(basis, i, vf)?;
        for j in 0..basis.len() {
            let lj = basis.polynomial(j)?;
            let nodes = (d.degree() + lj.degree()) as usize / 2 + 1;
            let q = gauss_legendre_inner_product(&d, lj, nodes)?;
            worst = worst.max((k[(i, j)] - q).abs() / q.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Largest `|K(i,j)|` with `deg L_j > deg L_i` for a linear field.
fn triangularity_violation(basis: &BasisSet, vf: &VectorField) -> Result<f64> {
    let k = assemble_koopman(basis, vf)?;
    let deg: Vec<u32> = basis.polynomials().iter().map(Polynomial::degree).collect();
    let mut worst = 0.0f64;
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if deg[j] > deg[i] {
                worst = worst.max(k[(i, j)].abs());
            }
        }
    }
    Ok(worst)
}

/// Largest `|x(0) - x0|` over `samples` random states in the open unit box.
pub fn reconstruction_deviation(order: usize, samples: usize, seed: u64) -> Result<f64> {
    let vf = duffing_vector_field(1.0, 1.0, 1.0, 0.001)?;
    let basis = BasisSet::new(order, 2)?;
    let model = KoopmanModel::build(basis, &vf, &ObservableSet::identity(&["q", "p"]))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x0 = [rng.gen_range(-0.999..0.999), rng.gen_range(-0.999..0.999)];
        let traj = model.solve(&x0, &[0.0])?;
        for (series, x) in traj.values.iter().zip(x0) {
            worst = worst.max((series[0] - x).abs());
        }
    }
    Ok(worst)
}

/// Error ratios of RK4 on the harmonic oscillator over `[0, 10]` as the
/// step halves from 1e-2.
pub fn rk4_convergence_ratios() -> Result<Vec<f64>> {
    let vf = duffing_vector_field(1.0, 1.0, 1.0, 0.0)?;
    let err = |h: f64| -> Result<f64> {
        let r = rk4_integrate(&vf, &[1.0, 0.0], &[0.0, 10.0], h)?;
        Ok((r.states[1][0] - 10f64.cos())
            .abs()
            .max((r.states[1][1] + 10f64.sin()).abs()))
    };
    let e = [err(1e-2)?, err(5e-3)?, err(2.5e-3)?];
    Ok(vec![e[0] / e[1], e[1] / e[2]])
}

/// Largest gap between the order-3, two-state basis and the printed tables.
pub fn printed_fixture_deviation() -> Result<f64> {
    let basis = BasisSet::new(3, 2)?;
    let mut worst = 0.0f64;
    for (i, row) in fixtures::MULTI_INDEX_C3_M2.iter().enumerate() {
        if basis.indices().row(i) != row {
            return Ok(f64::INFINITY);
        }
    }
    let mlp = basis.expansion_matrix();
    for (i, row) in fixtures::EXPANSION_C3_M2.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            worst = worst.max((mlp[(i, j)] - v).abs());
        }
    }
    let lpc = &basis.tables().lpc;
    for (i, row) in fixtures::LEGENDRE_C3.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            worst = worst.max((lpc[(i, j)] - v).abs());
        }
    }
    let l8 = canonicalize(fixtures::L8_TERMS.iter().map(|&(c, e)| Monomial::new(c, e.to_vec())), 2)?;
    let actual = basis.polynomial(8)?;
    if actual.terms().len() != l8.terms().len() {
        return Ok(f64::INFINITY);
    }
    for (a, b) in actual.terms().iter().zip(l8.terms()) {
        if a.exp != b.exp {
            return Ok(f64::INFINITY);
        }
        worst = worst.max((a.coef - b.coef).abs());
    }
    Ok(worst)
}

pub fn run_validate() -> ValidationReport {
    let mut checks = Vec::new();

    checks.push(check(
        "gram identity (c = 1..8, m = 2)",
        (1..=8)
            .map(|c| gram_deviation(c, 2))
            .try_fold(0.0f64, |w, d| d.map(|d| w.max(d)))
            .map(|w| (w <= 1e-12, format!("max deviation {w:.3e} (limit 1e-12)"))),
    ));

    checks.push(check(
        "quadrature equivalence (duffing, c = 3)",
        duffing_vector_field(1.0, 1.0, 1.0, 0.001).and_then(|vf| {
            let w = quadrature_deviation(&BasisSet::new(3, 2)?, &vf)?;
            Ok((w <= 1e-10, format!("max deviation {w:.3e} (limit 1e-10)")))
        }),
    ));

    checks.push(check(
        "degree triangularity (linear field, c = 4)",
        (|| {
            let a = |coef: f64, e: [u32; 2]| Monomial::new(coef, e.to_vec());
            let vf = VectorField::new(vec![
                canonicalize([a(-0.3, [1, 0]), a(1.2, [0, 1])], 2)?,
                canonicalize([a(-0.7, [1, 0]), a(-0.2, [0, 1])], 2)?,
            ])?;
            let w = triangularity_violation(&BasisSet::new(4, 2)?, &vf)?;
            Ok((w <= 1e-13, format!("max upper entry {w:.3e} (limit 1e-13)")))
        })(),
    ));

    checks.push(check(
        "t = 0 reconstruction (100 states, c = 3)",
        reconstruction_deviation(3, 100, 7).map(|w| (w <= 1e-9, format!("max deviation {w:.3e} (limit 1e-9)"))),
    ));

    checks.push(check(
        "rk4 order (harmonic oscillator)",
        rk4_convergence_ratios().map(|r| {
            let worst = r.iter().copied().fold(f64::INFINITY, f64::min);
            (worst >= 12.0, format!("min halving ratio {worst:.2} (limit 12)"))
        }),
    ));

    checks.push(check(
        "printed expansion fixture (c = 3, m = 2)",
        printed_fixture_deviation().map(|w| {
            (
                w <= fixtures::PRINTED_TOLERANCE,
                format!("max deviation {w:.3e} (limit {:.0e})", fixtures::PRINTED_TOLERANCE),
            )
        }),
    ));

    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -0.5,
            0.1,
            1.0 / 3.0,
            1e-7,
            2.5e-300,
            1e20,
            -123456.789,
            5e-324,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1e-7), "1e-7");
    }

    #[test]
    fn order_lists() {
        assert_eq!(parse_orders("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_orders("3").unwrap(), vec![3]);
        assert_eq!(parse_orders("2, 5,7").unwrap(), vec![2, 5, 7]);
        assert!(parse_orders("5..2").is_err());
        assert!(parse_orders("a").is_err());
        assert!(parse_orders("").is_err());
    }

    #[test]
    fn validation_suite_passes() {
        let report = run_validate();
        assert!(report.all_passed(), "{}", report.to_text());
        assert_eq!(report.checks.len(), 6);
    }
}
