//! Decision procedures for positivity and eventual positivity of matrix
//! semigroups `t ↦ e^{tA}`.
//!
//! In finite dimensions individual and uniform eventual positivity coincide
//! (apply the semigroup to each canonical unit vector), so a verdict carries a
//! single onset time `t₀`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig, expm_dense, Matrix, Spectrum, Vector, DEFAULT_TOL_SEP};

/// Default threshold for "strictly positive" eigenvector entries, relative to
/// the largest entry.
pub const DEFAULT_TOL_POS: f64 = 1e-10;

/// Resolution floor of the `t₀` bisection.
pub const T0_RESOLUTION: f64 = 1e-4;

const T0_SCAN_STEPS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Positive,
    EventuallyPositiveStrict,
    NotEventuallyPositive,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// One checked hypothesis: observed value against its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub status: Status,
    pub value: f64,
    pub threshold: f64,
}

impl Condition {
    fn pass_if(ok: bool, value: f64, threshold: f64) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Condition { status, value, threshold }
    }

    /// Three-way sign test: `> band` passes, `< -band` fails, otherwise
    /// inconclusive.
    fn banded(value: f64, band: f64) -> Self {
        let status = if value > band {
            Status::Pass
        } else if value < -band {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        Condition { status, value, threshold: band }
    }
}

/// Each hypothesis of the spectral characterization of eventual positivity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoutsosReport {
    pub spectral_bound: f64,
    pub leading_eigenvalue: (f64, f64),
    /// `|Im λ₀|` against the separation tolerance.
    pub leading_is_real: Condition,
    /// Rank deficiency of `A - λ₀I` (must equal 1).
    pub geometrically_simple: Condition,
    /// `spb(A)` minus the largest real part of every other eigenvalue.
    pub dominance: Condition,
    /// Smallest entry of the leading right eigenvector over its largest.
    pub right_eigenvector_positive: Condition,
    /// Same for the eigenvector of `Aᵀ`.
    pub left_eigenvector_positive: Condition,
    pub metzler: bool,
}

impl NoutsosReport {
    fn conditions(&self) -> [Status; 5] {
        [
            self.leading_is_real.status,
            self.geometrically_simple.status,
            self.dominance.status,
            self.right_eigenvector_positive.status,
            self.left_eigenvector_positive.status,
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.conditions().iter().all(|s| *s == Status::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.conditions().contains(&Status::Fail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub t: f64,
    pub j: usize,
    pub k: usize,
    /// `(e^{tA})_{jk}` divided by `max |e^{tA}|`.
    pub relative_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvPosVerdict {
    pub classification: Classification,
    #[serde(rename = "t0")]
    pub t0_estimate: Option<f64>,
    pub witness: Option<Witness>,
    #[serde(rename = "conditions")]
    pub criterion_report: NoutsosReport,
}

impl EvPosVerdict {
    pub fn witness_time(&self) -> Option<f64> {
        self.witness.map(|w| w.t)
    }

    pub fn witness_entry(&self) -> Option<(usize, usize)> {
        self.witness.map(|w| (w.j, w.k))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonnegCheck {
    pub holds: bool,
    /// Most negative violating entry.
    pub witness: Option<(usize, usize)>,
    pub min_entry: f64,
}

/// `M ≥ 0` up to `-tol_rel · (1 + ‖M‖_max)`.
pub fn is_entrywise_nonneg(m: &Matrix, tol_rel: f64) -> NonnegCheck {
    let floor = -tol_rel.max(0.0) * (1.0 + m.max_abs());
    let d = m.as_dmatrix();
    let (mut min_entry, mut at) = (f64::INFINITY, (0, 0));
    for k in 0..d.ncols() {
        for j in 0..d.nrows() {
            if d[(j, k)] < min_entry {
                min_entry = d[(j, k)];
                at = (j, k);
            }
        }
    }
    let holds = min_entry >= floor;
    NonnegCheck {
        holds,
        witness: (!holds).then_some(at),
        min_entry,
    }
}

/// All off-diagonal entries `≥ -tol`. These are exactly the generators of
/// positive matrix semigroups.
pub fn is_metzler(a: &Matrix, tol: f64) -> Result<bool> {
    let n = a.ensure_square("is_metzler")?;
    let d = a.as_dmatrix();
    Ok((0..n).all(|j| (0..n).all(|k| j == k || d[(j, k)] >= -tol)))
}

/// Metzler with zero row sums: the generator of a continuous-time Markov chain.
pub fn check_markov_generator(a: &Matrix, tol: f64) -> Result<bool> {
    Ok(is_metzler(a, tol)? && a.row_sums().iter().all(|s| s.abs() <= tol))
}

/// Evaluates the spectral hypotheses on an already computed spectrum.
pub fn noutsos_conditions(a: &Matrix, spec: &Spectrum, tol: f64) -> Result<NoutsosReport> {
    let scale = a.max_abs();
    let metzler = is_metzler(a, tol * scale)?;
    let lead = spec.leading();
    let leading_is_real = Condition::pass_if(lead.im.abs() <= spec.tol_sep, lead.im.abs(), spec.tol_sep);
    let multiplicity = spec.leading_geometric_multiplicity as f64;
    let geometrically_simple = Condition::pass_if(multiplicity == 1.0, multiplicity, 1.0);
    let dominance = Condition::pass_if(spec.dominance_gap > spec.tol_sep, spec.dominance_gap, spec.tol_sep);

    let sign_condition = |v: Option<Vector>| match v {
        Some(v) => Condition::banded(v.min_entry() / v.max_abs(), tol),
        None => Condition { status: Status::Fail, value: f64::NAN, threshold: tol },
    };
    Ok(NoutsosReport {
        spectral_bound: spec.spectral_bound,
        leading_eigenvalue: (lead.re, lead.im),
        leading_is_real,
        geometrically_simple,
        dominance,
        right_eigenvector_positive: sign_condition(spec.leading_right_real()),
        left_eigenvector_positive: sign_condition(spec.leading_left_real()),
        metzler,
    })
}

/// Horizon long enough for the subdominant modes to decay by `e^{-40}`.
pub fn default_horizon(spec: &Spectrum) -> f64 {
    let gap = spec.dominance_gap;
    if gap.is_finite() && gap > 0.0 {
        (40.0 / gap).clamp(1e-6, 1e6)
    } else {
        100.0
    }
}

/// Spectral classification of `e^{tA}` without the time-domain follow-ups.
fn classify(report: &NoutsosReport) -> Classification {
    if report.metzler {
        Classification::Positive
    } else if report.all_pass() {
        Classification::EventuallyPositiveStrict
    } else if report.any_fail() {
        Classification::NotEventuallyPositive
    } else {
        Classification::Inconclusive
    }
}

/// Decides eventual positivity of `e^{tA}` from the spectrum: the spectral
/// bound must be a real, geometrically simple, strictly dominant eigenvalue
/// whose eigenvectors for `A` and `Aᵀ` are strictly positive. Metzler
/// matrices are reported as `Positive` with `t₀ = 0`.
///
/// `tol` is the relative threshold for strictly positive eigenvector
/// entries; values within `±tol` of zero yield `Inconclusive`.
pub fn check_noutsos(a: &Matrix, tol: f64) -> Result<EvPosVerdict> {
    check_noutsos_with_horizon(a, tol, None)
}

/// As [`check_noutsos`] with an explicit horizon for the `t₀` search and the
/// witness scan.
pub fn check_noutsos_with_horizon(a: &Matrix, tol: f64, t_max: Option<f64>) -> Result<EvPosVerdict> {
    a.ensure_square("check_noutsos")?;
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    let report = noutsos_conditions(a, &spec, tol)?;
    let horizon = t_max.unwrap_or_else(|| default_horizon(&spec));
    let mut classification = classify(&report);
    let mut t0_estimate = None;
    let mut witness = None;
    match classification {
        Classification::Positive => t0_estimate = Some(0.0),
        Classification::EventuallyPositiveStrict => {
            t0_estimate = search_t0(a, &spec, horizon, tol).ok().map(|e| e.t0);
        }
        Classification::NotEventuallyPositive => {
            witness = find_negative_witness(a, &spec, horizon, tol)?;
            if witness.is_none() {
                classification = Classification::Inconclusive;
            }
        }
        Classification::Inconclusive => {}
    }
    Ok(EvPosVerdict {
        classification,
        t0_estimate,
        witness,
        criterion_report: report,
    })
}

/// Exponential of `t(A - sI)`: same sign pattern as `e^{tA}`, magnitudes
/// normalized by the leading growth `e^{ts}`.
fn shifted_exp(a: &Matrix, s: f64, t: f64) -> Result<DMatrix<f64>> {
    let mut m = a.as_dmatrix() * t;
    for i in 0..m.nrows() {
        m[(i, i)] -= s * t;
    }
    expm_dense(&m)
}

fn strictly_positive(e: &DMatrix<f64>, tol: f64) -> bool {
    let scale = e.amax();
    e.min() > tol * scale
}

/// Scans `t` geometrically up to `horizon` and returns the latest sampled
/// time at which `e^{tA}` has an entry below `-tol · max|e^{tA}|`.
fn find_negative_witness(a: &Matrix, spec: &Spectrum, horizon: f64, tol: f64) -> Result<Option<Witness>> {
    let s = spec.spectral_bound;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let t_lo = (1e-3 / scale).min(horizon);
    let mut best = None;
    let mut t = t_lo;
    while t <= horizon * (1.0 + 1e-12) {
        let e = shifted_exp(a, s, t)?;
        let mx = e.amax();
        let (mut min, mut at) = (f64::INFINITY, (0, 0));
        for k in 0..e.ncols() {
            for j in 0..e.nrows() {
                if e[(j, k)] < min {
                    min = e[(j, k)];
                    at = (j, k);
                }
            }
        }
        if mx > 0.0 && min < -tol * mx {
            best = Some(Witness {
                t,
                j: at.0,
                k: at.1,
                relative_value: min / mx,
            });
        }
        t *= 2f64.powf(0.25);
    }
    Ok(best)
}

/// Result of the onset-time search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct T0Estimate {
    pub t0: f64,
    pub t_max: f64,
    /// `max |e^{t_max(A - s I)} - P|` with `P` the rank-one Perron projection.
    pub projection_deviation: f64,
    pub limit_certified: bool,
    pub limit_projection: Matrix,
}

/// Smallest sampled `t₀` such that every entry of `e^{tA}` exceeds
/// `tol · max|e^{tA}|` for all sampled `t ∈ [t₀, t_max]`.
///
/// The search doubles `t` from the resolution floor up to `t_max`, bisects
/// between the last failing and first passing grid points, and then verifies
/// the tail on a uniform grid, restarting the bisection past any late
/// failure. The limit profile `e^{t_max(A - spb I)}` is compared with the
/// Perron projection computed from the eigendecomposition.
pub fn estimate_t0(a: &Matrix, t_max: f64, tol: f64) -> Result<T0Estimate> {
    a.ensure_square("estimate_t0")?;
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    let report = noutsos_conditions(a, &spec, tol)?;
    if !report.all_pass() {
        return Err(Error::Precondition(
            "estimate_t0 needs a real, simple, strictly dominant eigenvalue with strictly positive left and right eigenvectors".into(),
        ));
    }
    search_t0(a, &spec, t_max, tol)
}

fn search_t0(a: &Matrix, spec: &Spectrum, t_max: f64, tol: f64) -> Result<T0Estimate> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
    }
    let s = spec.spectral_bound;
    let projection = spec
        .perron_projection()
        .ok_or_else(|| Error::Precondition("leading eigenvalue has no Perron projection".into()))?;
    let metzler = is_metzler(a, 0.0)?;
    let positive_at = |t: f64| -> Result<bool> { Ok(strictly_positive(&shifted_exp(a, s, t)?, tol)) };

    let floor = T0_RESOLUTION.min(t_max);
    let mut grid = vec![floor];
    while *grid.last().unwrap() < t_max {
        grid.push((grid.last().unwrap() * 2.0).min(t_max));
    }
    let flags = grid.iter().map(|&t| positive_at(t)).collect::<Result<Vec<bool>>>()?;
    if !flags.last().copied().unwrap_or(false) {
        return Err(Error::Horizon { t_max });
    }
    let last_fail = flags.iter().rposition(|ok| !ok);
    let (mut lo, mut hi) = match last_fail {
        Some(i) => (grid[i], grid[i + 1]),
        None if metzler => (0.0, 0.0),
        None => (0.0, grid[0]),
    };

    let mut t0;
    for _round in 0..16 {
        while hi - lo > T0_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if positive_at(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        t0 = hi;
        match first_tail_failure(a, s, t0, t_max, tol)? {
            None => {
                return finish_t0(a, s, t0, t_max, tol, projection);
            }
            Some((fail, next_pass)) => {
                lo = fail;
                hi = next_pass;
            }
        }
    }
    Err(Error::Horizon { t_max })
}

/// Uniform scan of `[t0, t_max]`; returns the last failing sample and the
/// sample after it.
fn first_tail_failure(a: &Matrix, s: f64, t0: f64, t_max: f64, tol: f64) -> Result<Option<(f64, f64)>> {
    if t_max <= t0 {
        return Ok(None);
    }
    let dt = (t_max - t0) / T0_SCAN_STEPS as f64;
    let step = shifted_exp(a, s, dt)?;
    let mut e = shifted_exp(a, s, t0)?;
    let mut last_fail = None;
    for i in 1..=T0_SCAN_STEPS {
        e = &e * &step;
        if !strictly_positive(&e, tol) {
            last_fail = Some(i);
        }
    }
    Ok(last_fail.map(|i| (t0 + dt * i as f64, (t0 + dt * (i + 1) as f64).min(t_max))))
}

fn finish_t0(a: &Matrix, s: f64, t0: f64, t_max: f64, tol: f64, projection: Matrix) -> Result<T0Estimate> {
    let limit = shifted_exp(a, s, t_max)?;
    let projection_deviation = (&limit - projection.as_dmatrix()).amax();
    let limit_certified = projection_deviation <= 10.0 * tol * projection.max_abs().max(1.0);
    Ok(T0Estimate {
        t0,
        t_max,
        projection_deviation,
        limit_certified,
        limit_projection: projection,
    })
}

/// Outcome of one domination test `|w_j| ≤ C u_j` (or `v ≥ c u`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub holds: bool,
    pub constant: Option<f64>,
    pub failing_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfirmationSweep {
    pub horizon: f64,
    pub samples: usize,
    /// First sampled time from which `e^{tA}_{jk} / (u_j u_k)` stays strictly
    /// positive through the horizon.
    pub onset_time: Option<f64>,
    /// Smallest weighted entry over the largest, at the horizon.
    pub final_min_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformCriterionReport {
    pub cond1: DominationReport,
    pub cond2: DominationReport,
    pub verdict: bool,
    pub confirmation: Option<ConfirmationSweep>,
}

const CONFIRMATION_SAMPLES: usize = 400;

/// Sufficient criterion for uniform eventual positivity of a self-adjoint
/// semigroup, with respect to a strictly positive weight `u`:
///
/// 1. `spb(A)` is a simple eigenvalue whose eigenvector `v` satisfies
///    `v ≥ c·u` for some `c > 0`;
/// 2. every column of `e^{t1·A}` is dominated in modulus by `C·u`.
///
/// Columns generate the range, so column-wise domination is the whole-range
/// condition. In finite dimensions `C` is always finite; condition 2 is
/// reported as holding when the normalized constant
/// `C · ‖u‖_max / ‖e^{t1 A}‖_max` stays below `1 / tol`. Condition 1 uses
/// the normalized `c · ‖u‖_max / ‖v‖_max > tol`.
///
/// When both hold, a confirmation sweep checks that the `u`-weighted entries
/// of `e^{tA}` become and stay strictly positive.
pub fn check_uniform_selfadjoint_criterion(
    a: &Matrix,
    u: &Vector,
    t1: f64,
    tol: f64,
) -> Result<UniformCriterionReport> {
    let n = a.ensure_square("check_uniform_selfadjoint_criterion")?;
    if a.symmetry_defect() > tol * a.max_abs() {
        return Err(Error::Precondition(format!(
            "generator must be symmetric (‖A - Aᵀ‖_max = {:e})",
            a.symmetry_defect()
        )));
    }
    if u.dim() != n {
        return Err(Error::Dimension(format!("weight has length {}, matrix is {n}x{n}", u.dim())));
    }
    if let Some(j) = u.iter().position(|x| x <= 0.0) {
        return Err(Error::Precondition(format!("weight u must be strictly positive (u[{j}] = {})", u.get(j))));
    }
    if !(t1 >= 0.0) || !t1.is_finite() {
        return Err(Error::Domain(format!("t1 must be nonnegative, got {t1}")));
    }

    let spec = eig(a, DEFAULT_TOL_SEP)?;
    let s = spec.spectral_bound;
    let u_max = u.max_abs();

    let cond1 = match spec.leading_right_real().filter(|_| spec.simple_dominant) {
        None => DominationReport {
            holds: false,
            constant: None,
            failing_index: None,
        },
        Some(v) => {
            let (idx, c) = v
                .iter()
                .zip(u.iter())
                .map(|(vj, uj)| vj / uj)
                .enumerate()
                .fold((0, f64::INFINITY), |best, (j, r)| if r < best.1 { (j, r) } else { best });
            let holds = c * u_max / v.max_abs() > tol;
            DominationReport {
                holds,
                constant: holds.then_some(c),
                failing_index: (!holds).then_some(idx),
            }
        }
    };

    let e = shifted_exp(a, s, t1)?;
    let e_max = e.amax();
    let (mut c2, mut row) = (0.0f64, 0);
    for j in 0..n {
        let r = e.row(j).amax() / u.get(j);
        if r > c2 {
            c2 = r;
            row = j;
        }
    }
    let normalized = c2 * u_max / e_max.max(f64::MIN_POSITIVE);
    let holds2 = c2.is_finite() && normalized <= 1.0 / tol;
    let cond2 = DominationReport {
        holds: holds2,
        constant: holds2.then(|| c2 * (s * t1).exp()),
        failing_index: (!holds2).then_some(row),
    };

    let verdict = cond1.holds && cond2.holds;
    let confirmation = if verdict {
        Some(confirm_weighted_positivity(a, s, u, t1.max(default_horizon(&spec)), tol)?)
    } else {
        None
    };
    Ok(UniformCriterionReport {
        cond1,
        cond2,
        verdict,
        confirmation,
    })
}

fn confirm_weighted_positivity(a: &Matrix, s: f64, u: &Vector, horizon: f64, tol: f64) -> Result<ConfirmationSweep> {
    let n = a.dim();
    let dt = horizon / CONFIRMATION_SAMPLES as f64;
    let step = shifted_exp(a, s, dt)?;
    let mut e = DMatrix::<f64>::identity(n, n);
    let mut onset = None;
    let mut final_min_ratio = f64::NAN;
    for i in 1..=CONFIRMATION_SAMPLES {
        e = &e * &step;
        let w = DMatrix::from_fn(n, n, |j, k| e[(j, k)] / (u.get(j) * u.get(k)));
        let ratio = w.min() / w.amax();
        if ratio > tol {
            onset.get_or_insert(dt * i as f64);
        } else {
            onset = None;
        }
        final_min_ratio = ratio;
    }
    Ok(ConfirmationSweep {
        horizon,
        samples: CONFIRMATION_SAMPLES,
        onset_time: onset,
        final_min_ratio,
    })
}

/// `check_noutsos(A + s·B)` for each scale `s`.
pub fn perturbation_experiment(
    a: &Matrix,
    b: &Matrix,
    scales: &[f64],
    t_max: f64,
    tol: f64,
) -> Result<Vec<(f64, EvPosVerdict)>> {
    let n = a.ensure_square("perturbation_experiment")?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::Dimension("perturbation must match the generator".into()));
    }
    if b.min_entry() < 0.0 {
        return Err(Error::Precondition("perturbation B must be entrywise nonnegative".into()));
    }
    let base = check_noutsos_with_horizon(a, tol, Some(t_max))?;
    if !matches!(
        base.classification,
        Classification::EventuallyPositiveStrict | Classification::Positive
    ) {
        return Err(Error::Precondition("unperturbed generator is not eventually positive".into()));
    }
    scales
        .iter()
        .map(|&s| {
            let m = a + &b.scale(s);
            check_noutsos_with_horizon(&m, tol, Some(t_max)).map(|v| (s, v))
        })
        .collect()
}

/// Result of the randomized search for a nonnegative perturbation that
/// destroys eventual positivity. Absence of a hit is not a proof of anything.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationSearch {
    pub scale: f64,
    pub trials: usize,
    pub seed: u64,
    pub hits: usize,
    pub first_hit: Option<PerturbationHit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationHit {
    pub trial: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub verdict: EvPosVerdict,
}

/// Samples sparse nonnegative rank-one perturbations `B = x yᵀ` (each entry
/// of `x`, `y` is zero with probability 1/2, else uniform on `[0, 1)`) and
/// counts how often `A + scale·B` is classified `NotEventuallyPositive`.
pub fn search_destructive_perturbation(
    a: &Matrix,
    scale: f64,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<PerturbationSearch> {
    let n = a.ensure_square("search_destructive_perturbation")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n)
            .map(|_| if rng.random_bool(0.5) { 0.0 } else { rng.random::<f64>() })
            .collect()
    };
    let mut hits = 0;
    let mut first_hit = None;
    for trial in 0..trials {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let b = Matrix::outer(&Vector::new(x.clone())?, &Vector::new(y.clone())?)?;
        let m = a + &b.scale(scale);
        let spec = eig(&m, DEFAULT_TOL_SEP)?;
        let report = noutsos_conditions(&m, &spec, tol)?;
        if classify(&report) == Classification::NotEventuallyPositive {
            hits += 1;
            if first_hit.is_none() {
                let verdict = check_noutsos(&m, tol)?;
                first_hit = Some(PerturbationHit { trial, x, y, verdict });
            }
        }
    }
    Ok(PerturbationSearch {
        scale,
        trials,
        seed,
        hits,
        first_hit,
    })
}
