//! Scenario runner: one JSON document describes an input (matrix, operator or
//! evolution model), an analysis kind and its parameters. Running it writes a
//! deterministic `summary.json` plus CSV artifacts into an output directory.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use evpos_core::discretize::{build_operator, leading_eigenpair, Grid, OperatorSpec};
use evpos_core::io::{matrix_from_csv, matrix_to_csv};
use evpos_core::linalg::{eig, estimate_growth_bound, mat_exp, resolvent, Matrix, Vector, DEFAULT_TOL_SEP};
use evpos_core::maxprinciple::{
    antimax_equivalence_test, default_window, resolvent_sign_sweep, KernelBoundConfig,
};
use evpos_core::positivity::{
    check_markov_generator, check_noutsos_with_horizon, check_uniform_selfadjoint_criterion, default_horizon,
    estimate_t0, is_metzler, perturbation_experiment, search_destructive_perturbation, Classification,
};
use evpos_core::semigroups::{
    closed_axis, evolve, local_positivity_probe, periodic_axis, realified_fourier_generator, GridFunction,
    SemigroupModel,
};
use evpos_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA: &str = "evpos/1";

/// Documented defaults for every tunable of the scenario schema.
pub mod defaults {
    /// Relative threshold below which an entry counts as zero.
    pub const TOL_POS: f64 = 1e-10;
    /// Relative eigenvalue separation (times `‖A‖_max`).
    pub const TOL_SEP: f64 = 1e-7;
    pub const SWEEP_SAMPLES: usize = 16;
    pub const PERTURB_TRIALS: usize = 200;
    pub const PERTURB_SCALE: f64 = 5.0;
    pub const SEED: u64 = 7;
    pub const TRACE_SAMPLES: usize = 100;
    /// Largest realified Fourier truncation accepted as a matrix input.
    pub const MAX_REALIFIED_MODES: usize = 512;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AnalyzeMatrix,
    Simulate,
    ProbeLocal,
    SweepResolvent,
    CheckCriterion,
    Perturb,
}

/// Exactly one input source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Matrix(Matrix),
    /// CSV file, relative paths resolved against the scenario file.
    MatrixFile(PathBuf),
    Operator(OperatorSpec),
    Model(ModelInput),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelInput {
    /// `exp(-t |ξ|^{2·power})` on a periodic box; `centered` puts the box at
    /// `[-L/2, L/2)` instead of `[0, L)`.
    Fourier {
        power: u8,
        length: f64,
        modes: usize,
        #[serde(default = "one_u8")]
        dim: u8,
        #[serde(default)]
        centered: bool,
    },
    /// Gaussian kernel on the closed grid `[a, b]` with `n` points per axis.
    Heat {
        #[serde(default = "one_u8")]
        dim: u8,
        a: f64,
        b: f64,
        n: usize,
    },
    RightShift { a: f64, b: f64, n: usize },
}

fn one_u8() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDatum {
    /// `cos²` bump of total width `width`, rescaled to the given mean or mass.
    Bump {
        center: f64,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mass: Option<f64>,
    },
    Indicator { lo: f64, hi: f64 },
    Gaussian { center: f64, sigma: f64 },
    /// `1 + amplitude·cos(2π·mode·x)`.
    Cosine { amplitude: f64, mode: f64 },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range { start, stop, count, log } => {
                let k = (*count).max(1);
                if k == 1 {
                    return vec![*stop];
                }
                (0..k)
                    .map(|i| {
                        let s = i as f64 / (k - 1) as f64;
                        if *log {
                            start * (stop / start).powf(s)
                        } else {
                            start + (stop - start) * s
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowParam {
    HalfWidth(f64),
    Interval([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UChoice {
    Ones,
    DistanceSquared,
    LeadingEigenvector,
    File(PathBuf),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<UChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialDatum>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Time at which `simulate` additionally reports the distance to the mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_check: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub input: Input,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Directory that relative file references are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Failure of a scenario run, carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub const PARSE: i32 = 2;
    pub const NUMERICAL: i32 = 3;

    pub fn parse(message: impl Into<String>) -> Self {
        CliError {
            code: Self::PARSE,
            message: message.into(),
        }
    }

    fn numerical(op: &str, e: Error) -> Self {
        match e {
            Error::Parse { .. } => CliError::parse(format!("{op}: {e}")),
            e => CliError {
                code: Self::NUMERICAL,
                message: format!("{op}: {e}"),
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn num(op: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::numerical(op, e)
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces every scenario seed (see `EVPOS_SEED`).
    pub seed_override: Option<u64>,
}

impl RunOptions {
    pub fn from_env() -> CliResult<Self> {
        match std::env::var("EVPOS_SEED") {
            Ok(s) => s
                .trim()
                .parse()
                .map(|seed| RunOptions { seed_override: Some(seed) })
                .map_err(|e| CliError::parse(format!("EVPOS_SEED: {e}"))),
            Err(_) => Ok(RunOptions::default()),
        }
    }
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    let s: Scenario = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("scenario at line {}, column {}: {e}", e.line(), e.column())))?;
    validate(&s)?;
    Ok(s)
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let mut s = parse_scenario(&text)?;
    s.base_dir = path.parent().map(Path::to_path_buf);
    Ok(s)
}

fn validate(s: &Scenario) -> CliResult<()> {
    let p = &s.parameters;
    for (name, v) in [("tol", p.tol), ("t_max", p.t_max), ("t1", p.t1)] {
        if let Some(v) = v {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::parse(format!("parameter {name} must be positive, got {v}")));
            }
        }
    }
    if matches!(s.kind, Kind::Perturb) && p.seed.is_none() {
        return Err(CliError::parse("perturb scenarios need a seed"));
    }
    Ok(())
}

fn resolve(s: &Scenario, p: &Path) -> PathBuf {
    match &s.base_dir {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

/// The generator described by a matrix-valued input, with its grid when it
/// comes from a discretized operator.
fn generator(s: &Scenario) -> CliResult<(Matrix, Option<Grid>)> {
    match &s.input {
        Input::Matrix(m) => Ok((m.clone(), None)),
        Input::MatrixFile(p) => {
            let path = resolve(s, p);
            let m = matrix_from_csv(&read(&path)?)
                .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
            Ok((m, None))
        }
        Input::Operator(spec) => {
            let (m, g) = build_operator(spec).map_err(num("discretize::build_operator"))?;
            Ok((m, Some(g)))
        }
        Input::Model(ModelInput::Fourier { power, length, modes, dim: 1, .. }) => {
            if *modes > defaults::MAX_REALIFIED_MODES {
                return Err(CliError::parse(format!(
                    "realified Fourier generators are limited to {} modes",
                    defaults::MAX_REALIFIED_MODES
                )));
            }
            let m = realified_fourier_generator(*power, *length, *modes)
                .map_err(num("semigroups::realified_fourier_generator"))?;
            Ok((m, None))
        }
        Input::Model(_) => Err(CliError::parse("this model has no matrix generator; use simulate or probe-local")),
    }
}

fn model_and_grid(s: &Scenario) -> CliResult<(SemigroupModel, Vec<f64>, Option<Vec<f64>>)> {
    match &s.input {
        Input::Model(ModelInput::Fourier { power, length, modes, dim, centered }) => {
            let start = if *centered { -length / 2.0 } else { 0.0 };
            let axis = periodic_axis(start, *length, *modes);
            let y = match dim {
                1 => None,
                2 => Some(axis.clone()),
                d => return Err(CliError::parse(format!("Fourier model dimension must be 1 or 2, got {d}"))),
            };
            let model = SemigroupModel::FourierMultiplier { power: *power, length: *length, modes: *modes };
            Ok((model, axis, y))
        }
        Input::Model(ModelInput::Heat { dim, a, b, n }) => {
            let axis = closed_axis(*a, *b, *n);
            let y = (*dim == 2).then(|| axis.clone());
            Ok((SemigroupModel::HeatKernel { dim: *dim }, axis, y))
        }
        Input::Model(ModelInput::RightShift { a, b, n }) => Ok((SemigroupModel::RightShift, closed_axis(*a, *b, *n), None)),
        _ => {
            let (m, grid) = generator(s)?;
            let x = match grid {
                Some(g) => g.points,
                None => (0..m.dim()).map(|i| i as f64).collect(),
            };
            Ok((SemigroupModel::Matrix(m), x, None))
        }
    }
}

fn initial_datum(s: &Scenario, x: Vec<f64>, y: Option<Vec<f64>>) -> CliResult<GridFunction> {
    let datum = s
        .parameters
        .initial
        .as_ref()
        .ok_or_else(|| CliError::parse("parameters.initial is required for this kind"))?;
    let f: Box<dyn Fn(f64) -> f64> = match datum {
        InitialDatum::File(p) => {
            let path = resolve(s, p);
            return GridFunction::from_csv(&read(&path)?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())));
        }
        InitialDatum::Bump { center, width, .. } => {
            let (c, w) = (*center, *width);
            Box::new(move |t| {
                let r = (t - c) / w;
                if r.abs() < 0.5 {
                    (PI * r).cos().powi(2)
                } else {
                    0.0
                }
            })
        }
        InitialDatum::Indicator { lo, hi } => {
            let (lo, hi) = (*lo, *hi);
            let eps = 1e-9 * (hi - lo).abs().max(1.0);
            Box::new(move |t| if t >= lo - eps && t <= hi + eps { 1.0 } else { 0.0 })
        }
        InitialDatum::Gaussian { center, sigma } => {
            let (c, sg) = (*center, *sigma);
            Box::new(move |t| (-(t - c).powi(2) / (2.0 * sg * sg)).exp())
        }
        InitialDatum::Cosine { amplitude, mode } => {
            let (a, k) = (*amplitude, *mode);
            Box::new(move |t| 1.0 + a * (2.0 * PI * k * t).cos())
        }
    };
    let mut g = match y {
        None => GridFunction::sample_1d(x, f),
        Some(y) => GridFunction::sample_2d(x, y, |a, b| f(a) * f(b)),
    }
    .map_err(num("semigroups::sample"))?;
    if let InitialDatum::Bump { mean, mass, .. } = datum {
        let factor = match (mean, mass) {
            (Some(m), _) => m / g.mean(),
            (None, Some(m)) => m / g.l1_norm(),
            (None, None) => 1.0,
        };
        g.values.iter_mut().for_each(|v| *v *= factor);
    }
    Ok(g)
}

fn u_vector(s: &Scenario, a: &Matrix, grid: Option<&Grid>) -> CliResult<Vector> {
    match s.parameters.u.clone().unwrap_or(UChoice::Ones) {
        UChoice::Ones => Ok(Vector::ones(a.dim())),
        UChoice::DistanceSquared => grid
            .ok_or_else(|| CliError::parse("u = distance-squared needs an operator input"))?
            .distance_squared()
            .map_err(num("discretize::distance_squared")),
        UChoice::LeadingEigenvector => leading_eigenpair(a).map(|p| p.1).map_err(num("discretize::leading_eigenpair")),
        UChoice::File(p) => {
            let path = resolve(s, &p);
            let m = matrix_from_csv(&read(&path)?).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
            Vector::new(m.to_row_major()).map_err(num("linalg::vector"))
        }
    }
}

/// Summary plus named CSV artifacts.
pub struct Report {
    pub summary: Value,
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    /// `summary.json` exactly as written to disk.
    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let io = |e: std::io::Error| CliError::parse(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("summary.json"), self.summary_json()).map_err(io)?;
        for (name, body) in &self.artifacts {
            fs::write(dir.join(name), body).map_err(io)?;
        }
        Ok(())
    }
}

/// Runs a scenario without touching the file system for outputs.
pub fn execute(s: &Scenario, opts: &RunOptions) -> CliResult<Report> {
    validate(s)?;
    let mut artifacts = Vec::new();
    let results = match s.kind {
        Kind::AnalyzeMatrix => analyze(s, &mut artifacts)?,
        Kind::Simulate => simulate(s, &mut artifacts)?,
        Kind::ProbeLocal => probe(s, &mut artifacts)?,
        Kind::SweepResolvent => sweep(s, &mut artifacts)?,
        Kind::CheckCriterion => criterion(s)?,
        Kind::Perturb => perturb(s, opts, &mut artifacts)?,
    };
    let summary = json!({
        "schema": SCHEMA,
        "scenario": s.name,
        "kind": s.kind,
        "results": results,
    });
    Ok(Report { summary, artifacts })
}

/// Runs a scenario and writes `summary.json` and its CSV artifacts to `out`.
pub fn run_scenario(s: &Scenario, out: &Path, opts: &RunOptions) -> CliResult<Value> {
    let report = execute(s, opts)?;
    report.write(out)?;
    Ok(report.summary)
}

fn tol(s: &Scenario) -> f64 {
    s.parameters.tol.unwrap_or(defaults::TOL_POS)
}

fn analyze(s: &Scenario, artifacts: &mut Vec<(String, String)>) -> CliResult<Value> {
    let (a, _) = generator(s)?;
    let tol = tol(s);
    let spec = eig(&a, DEFAULT_TOL_SEP).map_err(num("linalg::eig"))?;
    let verdict = check_noutsos_with_horizon(&a, tol, s.parameters.t_max).map_err(num("positivity::check_noutsos"))?;
    let horizon = s.parameters.t_max.unwrap_or_else(|| default_horizon(&spec));
    let mut out = json!({
        "dimension": a.dim(),
        "classification": verdict.classification,
        "t0": verdict.t0_estimate,
        "witness": verdict.witness,
        "conditions": verdict.criterion_report,
        "spectral_bound": spec.spectral_bound,
        "leading_eigenvalue": [spec.leading().re, spec.leading().im],
        "dominance_gap": spec.dominance_gap,
        "metzler": is_metzler(&a, 0.0).map_err(num("positivity::is_metzler"))?,
        "horizon": horizon,
        "tol_pos": tol,
        "tol_sep": defaults::TOL_SEP,
    });
    if a.dim() <= 16 {
        out["eigenvalues"] = json!(spec.eigenvalue_pairs());
    }
    if spec.dominance_gap > 0.0 && spec.dominance_gap.is_finite() {
        let g = estimate_growth_bound(&a, horizon, 400).map_err(num("linalg::estimate_growth_bound"))?;
        out["growth_bound_estimate"] = json!(g);
    }
    if verdict.classification == Classification::EventuallyPositiveStrict {
        let est = estimate_t0(&a, horizon, tol).map_err(num("positivity::estimate_t0"))?;
        out["limit_certified"] = json!(est.limit_certified);
        out["projection_deviation"] = json!(est.projection_deviation);
        if a.dim() <= 16 {
            out["limit_projection"] = json!(est.limit_projection.to_row_major());
        }
    }
    if check_markov_generator(&a, 1e-12).map_err(num("positivity::check_markov_generator"))? {
        let mut dev: f64 = 0.0;
        for t in [0.1, 1.0, 10.0] {
            let e = mat_exp(&a, t).map_err(num("linalg::mat_exp"))?;
            dev = e.row_sums().iter().fold(dev, |m, r| m.max((r - 1.0).abs()));
        }
        out["markov"] = json!({ "generator": true, "row_sum_max_deviation": dev });
    } else {
        out["markov"] = json!({ "generator": false });
    }
    if matches!(s.input, Input::Operator(_)) {
        if let Ok(r) = resolvent(&a, 0.0) {
            // (0 - A)⁻¹ = (-A)⁻¹
            out["inverse_min_ratio"] = json!(r.min_entry() / r.max_abs());
        }
        if let Some(v) = spec.leading_right_real() {
            out["leading_eigenvector_min"] = json!(v.min_entry() / v.max_abs());
        }
    }
    // sign of e^{tA} over the horizon
    let mut csv = String::from("t,min_entry,max_entry\n");
    for i in 0..=defaults::TRACE_SAMPLES {
        let t = horizon * i as f64 / defaults::TRACE_SAMPLES as f64;
        let e = mat_exp(&a.shift(-spec.spectral_bound), t).map_err(num("linalg::mat_exp"))?;
        csv.push_str(&format!("{t},{},{}\n", e.min_entry(), e.max_entry()));
    }
    artifacts.push(("exp_trace.csv".into(), csv));
    if a.dim() <= 64 {
        artifacts.push(("matrix.csv".into(), matrix_to_csv(&a)));
    }
    Ok(out)
}

fn times(s: &Scenario) -> CliResult<Vec<f64>> {
    let t = s
        .parameters
        .times
        .as_ref()
        .ok_or_else(|| CliError::parse("parameters.times is required for this kind"))?
        .points();
    if t.is_empty() || t.iter().any(|x| !(*x >= 0.0)) || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::parse("times must be nonnegative and increasing"));
    }
    Ok(t)
}

fn simulate(s: &Scenario, artifacts: &mut Vec<(String, String)>) -> CliResult<Value> {
    let (model, x, y) = model_and_grid(s)?;
    let u0 = initial_datum(s, x, y)?;
    let ts = times(s)?;
    let tol = tol(s);
    let mean = u0.mean();
    let mass0 = u0.l1_norm();
    let mut csv = String::from("t,min,max,mass,sup_distance_to_mean\n");
    let mut mins = Vec::with_capacity(ts.len());
    let mut last = u0.clone();
    for &t in &ts {
        let u = evolve(&model, &u0, t).map_err(num("semigroups::evolve"))?;
        let dist = u.values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        let mass = u.spacing().powi(u.dim() as i32) * u.values.iter().sum::<f64>();
        csv.push_str(&format!("{t},{},{},{mass},{dist}\n", u.min(), u.sup_norm()));
        mins.push(u.min());
        last = u;
    }
    let onset_idx = mins.iter().rposition(|m| *m < -tol).map_or(0, |i| i + 1);
    let final_dist = last.values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    let mut out = json!({
        "samples": ts.len(),
        "horizon": ts.last(),
        "initial_min": u0.min(),
        "initial_mean": mean,
        "initial_mass": mass0,
        "negative_before_onset": mins[..onset_idx].iter().any(|m| *m < -tol),
        "onset_time": ts.get(onset_idx),
        "final_min": last.min(),
        "final_sup_distance_to_mean": final_dist,
        "tol": tol,
    });
    if let Some(tc) = s.parameters.t_check {
        let u = evolve(&model, &u0, tc).map_err(num("semigroups::evolve"))?;
        let dist = u.values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        let dev0 = u0.values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
        out["check"] = json!({ "t": tc, "sup_distance_to_mean": dist, "initial_deviation": dev0 });
    }
    artifacts.push(("evolution.csv".into(), csv));
    artifacts.push(("final.csv".into(), last.to_csv()));
    Ok(out)
}

fn probe(s: &Scenario, artifacts: &mut Vec<(String, String)>) -> CliResult<Value> {
    let (model, x, y) = model_and_grid(s)?;
    let u0 = initial_datum(s, x, y)?;
    let ts = times(s)?;
    let window = match s.parameters.window {
        Some(WindowParam::Interval([lo, hi])) => (lo, hi),
        Some(WindowParam::HalfWidth(w)) => (-w, w),
        None => return Err(CliError::parse("probe-local needs parameters.window")),
    };
    let tol = tol(s);
    let r = local_positivity_probe(&model, &u0, window, &ts, tol).map_err(num("semigroups::local_positivity_probe"))?;
    artifacts.push(("probe.csv".into(), r.to_csv()));
    Ok(json!({
        "window": [r.window.0, r.window.1],
        "onset_time": r.onset_time,
        "persistence_checked_until": r.persistence_checked_until,
        "negative_before_onset": r.has_negative_excursion(tol),
        "min_over_window_first": r.min_value_trace.first().map(|p| p.1),
        "min_over_window_last": r.min_value_trace.last().map(|p| p.1),
        "samples": r.min_value_trace.len(),
        "tol": tol,
    }))
}

fn sweep(s: &Scenario, artifacts: &mut Vec<(String, String)>) -> CliResult<Value> {
    let (a, grid) = generator(s)?;
    let tol = tol(s);
    let lambda0 = match s.parameters.lambda0 {
        Some(l) => l,
        None => leading_eigenpair(&a).map_err(num("maxprinciple::leading_eigenpair"))?.0,
    };
    let window = match s.parameters.window {
        Some(WindowParam::HalfWidth(w)) => w,
        Some(WindowParam::Interval(_)) => return Err(CliError::parse("sweep-resolvent takes a half-width window")),
        None => default_window(&a, lambda0).map_err(num("maxprinciple::default_window"))?,
    };
    let samples = s.parameters.samples.unwrap_or(defaults::SWEEP_SAMPLES);
    let p = resolvent_sign_sweep(&a, lambda0, window, samples, tol).map_err(num("maxprinciple::resolvent_sign_sweep"))?;
    artifacts.push(("sweep.csv".into(), p.to_csv()));
    let mut out = json!({
        "lambda0": lambda0,
        "window": window,
        "samples_per_side": samples,
        "left_window_verdict": p.left_window_verdict,
        "right_window_verdict": p.right_window_verdict,
        "tol": tol,
    });
    if let Some(mu1) = s.parameters.mu1 {
        let u = u_vector(s, &a, grid.as_ref())?;
        let cfg = KernelBoundConfig {
            weight: grid.as_ref().map_or(1.0, |g| g.weight()),
            ..Default::default()
        };
        let eq = antimax_equivalence_test(&a, &u, lambda0, mu1, tol, &cfg)
            .map_err(num("maxprinciple::antimax_equivalence_test"))?;
        out["mu1"] = json!(mu1);
        out["equivalence"] = json!(eq);
    }
    Ok(out)
}

fn criterion(s: &Scenario) -> CliResult<Value> {
    let (a, grid) = generator(s)?;
    let u = u_vector(s, &a, grid.as_ref())?;
    let t1 = s.parameters.t1.unwrap_or(1.0);
    let tol = tol(s);
    let r = check_uniform_selfadjoint_criterion(&a, &u, t1, tol)
        .map_err(num("positivity::check_uniform_selfadjoint_criterion"))?;
    Ok(json!({ "t1": t1, "tol": tol, "report": r }))
}

fn perturb(s: &Scenario, opts: &RunOptions, artifacts: &mut Vec<(String, String)>) -> CliResult<Value> {
    let (a, _) = generator(s)?;
    let tol = tol(s);
    let seed = opts.seed_override.or(s.parameters.seed).unwrap_or(defaults::SEED);
    let scale = s.parameters.scale.unwrap_or(defaults::PERTURB_SCALE);
    let trials = s.parameters.trials.unwrap_or(defaults::PERTURB_TRIALS);
    let search = search_destructive_perturbation(&a, scale, trials, seed, tol)
        .map_err(num("positivity::search_destructive_perturbation"))?;
    let mut out = json!({
        "seed": seed,
        "scale": scale,
        "trials": trials,
        "hits": search.hits,
        "first_hit": search.first_hit,
    });
    if let Some(hit) = &search.first_hit {
        let b = Matrix::outer(
            &Vector::new(hit.x.clone()).map_err(num("linalg::vector"))?,
            &Vector::new(hit.y.clone()).map_err(num("linalg::vector"))?,
        )
        .map_err(num("linalg::outer"))?;
        let scales: Vec<f64> = (0..=16).map(|i| scale * i as f64 / 16.0).collect();
        let t_max = s.parameters.t_max.unwrap_or(40.0);
        let path = perturbation_experiment(&a, &b, &scales, t_max, tol)
            .map_err(num("positivity::perturbation_experiment"))?;
        let mut csv = String::from("scale,classification\n");
        for (sc, v) in &path {
            csv.push_str(&format!("{sc},{:?}\n", v.classification));
        }
        let first_bad = path
            .iter()
            .find(|(_, v)| v.classification == Classification::NotEventuallyPositive)
            .map(|p| p.0);
        out["first_destructive_scale"] = json!(first_bad);
        artifacts.push(("perturbation.csv".into(), csv));
    }
    Ok(out)
}

/// The 3×3 generator `V R Vᵀ` with `V` the orthonormal basis
/// `(1,1,1)/√3, (-1,0,1)/√2, (1,-2,1)/√6` and `R = [0 0 0; 0 -1 -1; 0 1 -1]`.
pub fn rotation_example_matrix() -> Matrix {
    let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / 2f64.sqrt(), 1.0 / 6f64.sqrt());
    let v = [[a, -b, c], [a, 0.0, -2.0 * c], [a, b, c]];
    let r = [[0.0, 0.0, 0.0], [0.0, -1.0, -1.0], [0.0, 1.0, -1.0]];
    Matrix::from_fn(3, 3, |i, j| {
        let mut s = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                s += v[i][k] * r[k][l] * v[j][l];
            }
        }
        s
    })
    .expect("finite entries")
}

fn scenario(name: &str, kind: Kind, input: Input, parameters: Parameters) -> Scenario {
    Scenario {
        name: name.into(),
        kind,
        input,
        parameters,
        output_dir: None,
        base_dir: None,
    }
}

fn log_times(start: f64, stop: f64, count: usize) -> Option<TimeGrid> {
    Some(TimeGrid::Range { start, stop, count, log: true })
}

/// Every worked example as a named scenario.
pub fn builtin_suite() -> Vec<Scenario> {
    use evpos_core::discretize::BoundaryCondition::*;
    let p = Parameters::default;
    vec![
        scenario("rotation-matrix", Kind::AnalyzeMatrix, Input::Matrix(rotation_example_matrix()), p()),
        scenario(
            "periodic-biharmonic-bump",
            Kind::Simulate,
            Input::Model(ModelInput::Fourier { power: 2, length: 1.0, modes: 4096, dim: 1, centered: false }),
            Parameters {
                initial: Some(InitialDatum::Bump { center: 0.5, width: 0.05, mean: Some(1.0), mass: None }),
                times: log_times(1e-7, 0.05, 80),
                t_check: Some(0.01),
                ..p()
            },
        ),
        scenario(
            "markov-example",
            Kind::AnalyzeMatrix,
            Input::Matrix(
                Matrix::from_rows(&[[-1.0, 1.0, 0.0], [0.5, -1.0, 0.5], [0.0, 2.0, -2.0]]).expect("finite entries"),
            ),
            p(),
        ),
        scenario(
            "heat-kernel",
            Kind::Simulate,
            Input::Model(ModelInput::Heat { dim: 1, a: -8.0, b: 8.0, n: 1601 }),
            Parameters {
                initial: Some(InitialDatum::Bump { center: 0.0, width: 1.0, mean: None, mass: Some(1.0) }),
                times: Some(TimeGrid::List(vec![0.001, 0.01, 0.1, 1.0])),
                ..p()
            },
        ),
        scenario(
            "right-shift",
            Kind::Simulate,
            Input::Model(ModelInput::RightShift { a: 0.0, b: 10.0, n: 1001 }),
            Parameters {
                initial: Some(InitialDatum::Indicator { lo: 0.0, hi: 1.0 }),
                times: Some(TimeGrid::List(vec![0.0, 2.0])),
                ..p()
            },
        ),
        scenario(
            "clamped-beam",
            Kind::CheckCriterion,
            Input::Operator(OperatorSpec::new(4, Clamped, 200)),
            Parameters { u: Some(UChoice::DistanceSquared), t1: Some(0.05), ..p() },
        ),
        scenario(
            "nonlocal-laplacian",
            Kind::AnalyzeMatrix,
            Input::Operator(OperatorSpec::new(2, NonlocalSum, 200)),
            p(),
        ),
        scenario(
            "biharmonic-line-local",
            Kind::ProbeLocal,
            Input::Model(ModelInput::Fourier { power: 2, length: 64.0, modes: 4096, dim: 1, centered: true }),
            Parameters {
                initial: Some(InitialDatum::Bump { center: 0.0, width: 1.0, mean: None, mass: Some(1.0) }),
                window: Some(WindowParam::Interval([-1.0, 1.0])),
                times: log_times(1e-3, 1.5, 60),
                ..p()
            },
        ),
        scenario(
            "neumann-antimax",
            Kind::SweepResolvent,
            Input::Operator(OperatorSpec::new(2, Neumann, 200)),
            Parameters { u: Some(UChoice::Ones), mu1: Some(1.0), ..p() },
        ),
        scenario(
            "dirichlet-no-antimax",
            Kind::SweepResolvent,
            Input::Operator(OperatorSpec::new(2, Dirichlet, 200)),
            Parameters { u: Some(UChoice::LeadingEigenvector), mu1: Some(0.0), ..p() },
        ),
        scenario(
            "perturbation-fragility",
            Kind::Perturb,
            Input::Matrix(rotation_example_matrix()),
            Parameters { seed: Some(defaults::SEED), ..p() },
        ),
        scenario(
            "periodic-biharmonic-criterion",
            Kind::CheckCriterion,
            Input::Model(ModelInput::Fourier { power: 2, length: 1.0, modes: 32, dim: 1, centered: false }),
            Parameters { u: Some(UChoice::Ones), t1: Some(1.0), ..p() },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_json_shape() {
        let s = parse_scenario(
            r#"{"name":"n","kind":"sweep-resolvent","input":{"operator":{"order":2,"bc":"Neumann","n":50}},
                "parameters":{"mu1":1.0,"u":"ones"}}"#,
        )
        .unwrap();
        assert_eq!(s.kind, Kind::SweepResolvent);
        assert_eq!(s.parameters.u, Some(UChoice::Ones));
        let back = parse_scenario(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_have_code_2() {
        let e = parse_scenario(r#"{"name":"x","kind":"nope","input":{}}"#).unwrap_err();
        assert_eq!(e.code, CliError::PARSE);
        assert!(e.message.contains("line 1"));
        let e = parse_scenario(
            r#"{"name":"x","kind":"perturb","input":{"matrix":{"rows":1,"cols":1,"entries":[0.0]}}}"#,
        )
        .unwrap_err();
        assert!(e.message.contains("seed"));
        let e = parse_scenario(
            r#"{"name":"x","kind":"analyze-matrix","input":{"matrix":{"rows":1,"cols":1,"entries":[0.0]}},"parameters":{"tol":-1}}"#,
        )
        .unwrap_err();
        assert_eq!(e.code, CliError::PARSE);
    }

    #[test]
    fn numerical_errors_name_the_operation() {
        let s = scenario(
            "bad",
            Kind::SweepResolvent,
            Input::Matrix(Matrix::from_diagonal(&[0.0, -1.0]).unwrap()),
            Parameters { lambda0: Some(0.0), window: Some(WindowParam::HalfWidth(0.9)), ..Default::default() },
        );
        let e = execute(&s, &RunOptions::default()).err().unwrap();
        assert_eq!(e.code, CliError::NUMERICAL);
        assert!(e.message.starts_with("maxprinciple::resolvent_sign_sweep"), "{}", e.message);
    }

    #[test]
    fn time_grids() {
        let g = TimeGrid::Range { start: 1.0, stop: 100.0, count: 3, log: true };
        let p = g.points();
        assert!((p[1] - 10.0).abs() < 1e-12 && p[2] == 100.0);
        let g: TimeGrid = serde_json::from_str("[0, 2]").unwrap();
        assert_eq!(g.points(), vec![0.0, 2.0]);
    }

    #[test]
    fn suite_names_are_unique() {
        let suite = builtin_suite();
        assert!(suite.len() >= 11);
        let mut names: Vec<_> = suite.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), suite.len());
    }
}
