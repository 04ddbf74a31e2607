//! Sign structure of resolvents `(λ - A)⁻¹` around the leading eigenvalue:
//! maximum principles on the right, anti-maximum principles on the left, and
//! the kernel-bound characterization of the uniform anti-maximum principle.

use std::fmt::Write as _;

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig, resolvent, Matrix, Spectrum, Vector, DEFAULT_TOL_SEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    EntrywiseNonneg,
    EntrywiseNonpos,
    Mixed,
    NearSingular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeftVerdict {
    UniformAntiMax,
    NoAntiMax,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RightVerdict {
    UniformMax,
    NoMax,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignProfile {
    pub lambda0: f64,
    /// Half-width of the sampled neighbourhoods on either side of `lambda0`.
    pub window: f64,
    pub tol_sep: f64,
    /// Sample points in increasing order.
    pub sweep_points: Vec<f64>,
    pub classifications: Vec<SignClass>,
    pub min_entries: Vec<f64>,
    pub max_entries: Vec<f64>,
    pub left_window_verdict: LeftVerdict,
    pub right_window_verdict: RightVerdict,
}

impl SignProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,min_entry,max_entry,classification\n");
        for i in 0..self.sweep_points.len() {
            writeln!(
                out,
                "{},{},{},{:?}",
                self.sweep_points[i], self.min_entries[i], self.max_entries[i], self.classifications[i]
            )
            .unwrap();
        }
        out
    }

    fn side(&self, left: bool) -> impl Iterator<Item = SignClass> + '_ {
        self.sweep_points
            .iter()
            .zip(&self.classifications)
            .filter(move |(l, _)| (**l < self.lambda0) == left)
            .map(|(_, c)| *c)
            .filter(|c| *c != SignClass::NearSingular)
    }
}

/// Distance from `lambda0` to the nearest other eigenvalue of `spec`.
fn isolation_gap(spec: &Spectrum, lambda0: f64) -> f64 {
    let z0 = Complex::new(lambda0, 0.0);
    spec.eigenvalues
        .iter()
        .map(|z| (z - z0).norm())
        .filter(|d| *d > spec.tol_sep)
        .fold(f64::INFINITY, f64::min)
}

fn locate_eigenvalue(spec: &Spectrum, lambda0: f64) -> Result<()> {
    let (dist, _) = spec.nearest(Complex::new(lambda0, 0.0));
    if dist > spec.tol_sep.max(1e-9 * lambda0.abs()) {
        return Err(Error::Precondition(format!(
            "{lambda0} is not an eigenvalue (nearest at distance {dist:e})"
        )));
    }
    Ok(())
}

/// Default sweep half-width: one eighth of the distance to the next eigenvalue.
///
/// Half the gap is too wide in general: for the Neumann Laplacian on the unit
/// interval the resolvent stays negative only for `λ ∈ (-π²/4, 0)`, a quarter
/// of the gap.
pub fn default_window(a: &Matrix, lambda0: f64) -> Result<f64> {
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    locate_eigenvalue(&spec, lambda0)?;
    let gap = isolation_gap(&spec, lambda0);
    Ok(if gap.is_finite() { gap / 8.0 } else { lambda0.abs().max(1.0) })
}

/// Geometric offsets from `2·tol_sep` (at least `1e-8·window`) to `window`.
fn offsets(tol_sep: f64, window: f64, samples: usize) -> Vec<f64> {
    let lo = (2.0 * tol_sep).max(1e-8 * window).min(window / 2.0);
    if samples == 1 {
        return vec![window];
    }
    let r = (window / lo).powf(1.0 / (samples - 1) as f64);
    (0..samples).map(|i| lo * r.powi(i as i32)).collect()
}

struct Sample {
    class: SignClass,
    min: f64,
    max: f64,
    resolvent: Option<Matrix>,
}

fn classify_at(a: &Matrix, spec: &Spectrum, lambda: f64, tol: f64, keep: bool) -> Result<Sample> {
    let near = |min, max| Sample {
        class: SignClass::NearSingular,
        min,
        max,
        resolvent: None,
    };
    if spec.nearest(Complex::new(lambda, 0.0)).0 < spec.tol_sep {
        return Ok(near(f64::NAN, f64::NAN));
    }
    let r = match resolvent(a, lambda) {
        Ok(r) => r,
        Err(Error::Singular { .. }) => return Ok(near(f64::NAN, f64::NAN)),
        Err(e) => return Err(e),
    };
    let (min, max) = (r.min_entry(), r.max_entry());
    let scale = r.max_abs();
    let class = if min >= -tol * scale {
        SignClass::EntrywiseNonneg
    } else if max <= tol * scale {
        SignClass::EntrywiseNonpos
    } else {
        SignClass::Mixed
    };
    Ok(Sample {
        class,
        min,
        max,
        resolvent: keep.then_some(r),
    })
}

struct Prepared {
    spec: Spectrum,
    deltas: Vec<f64>,
}

fn prepare(a: &Matrix, lambda0: f64, window: f64, samples: usize) -> Result<Prepared> {
    a.ensure_square("resolvent_sign_sweep")?;
    if !(window > 0.0) || !window.is_finite() || samples == 0 {
        return Err(Error::Domain("sweep needs a positive window and at least one sample".into()));
    }
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    locate_eigenvalue(&spec, lambda0)?;
    let z0 = Complex::new(lambda0, 0.0);
    if let Some(z) = spec
        .eigenvalues
        .iter()
        .find(|z| (*z - z0).norm() > spec.tol_sep && (*z - z0).norm() <= 2.0 * window)
    {
        return Err(Error::Isolation {
            lambda0,
            intruder: z.re,
        });
    }
    let deltas = offsets(spec.tol_sep, window, samples);
    Ok(Prepared { spec, deltas })
}

/// Classifies `(λ - A)⁻¹` at `samples` points on each side of the eigenvalue
/// `lambda0`, at geometric distances from `2·tol_sep` up to `window`.
///
/// `tol` is relative to the largest resolvent entry at each point.
pub fn resolvent_sign_sweep(a: &Matrix, lambda0: f64, window: f64, samples: usize, tol: f64) -> Result<SignProfile> {
    let Prepared { spec, deltas } = prepare(a, lambda0, window, samples)?;
    let mut points: Vec<f64> = deltas.iter().rev().map(|d| lambda0 - d).collect();
    points.extend(deltas.iter().map(|d| lambda0 + d));
    let results = points
        .par_iter()
        .map(|&l| classify_at(a, &spec, l, tol, false))
        .collect::<Result<Vec<_>>>()?;

    let mut profile = SignProfile {
        lambda0,
        window,
        tol_sep: spec.tol_sep,
        classifications: results.iter().map(|s| s.class).collect(),
        min_entries: results.iter().map(|s| s.min).collect(),
        max_entries: results.iter().map(|s| s.max).collect(),
        sweep_points: points,
        left_window_verdict: LeftVerdict::Inconclusive,
        right_window_verdict: RightVerdict::Inconclusive,
    };
    let left: Vec<_> = profile.side(true).collect();
    if !left.is_empty() {
        profile.left_window_verdict = if left.iter().all(|c| *c == SignClass::EntrywiseNonpos) {
            LeftVerdict::UniformAntiMax
        } else {
            LeftVerdict::NoAntiMax
        };
    }
    let right: Vec<_> = profile.side(false).collect();
    if !right.is_empty() {
        profile.right_window_verdict = if right.iter().all(|c| *c == SignClass::EntrywiseNonneg) {
            RightVerdict::UniformMax
        } else {
            RightVerdict::NoMax
        };
    }
    Ok(profile)
}

/// Individual anti-maximum windows: for each canonical `f = e_k`, the largest
/// sampled `δ ≤ window` such that `(λ - A)⁻¹ e_k ≤ 0` at every sampled
/// `λ ∈ [λ0 - δ, λ0)`. Zero when even the closest sample fails.
pub fn individual_antimax_windows(
    a: &Matrix,
    lambda0: f64,
    window: f64,
    samples: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let Prepared { spec, deltas } = prepare(a, lambda0, window, samples)?;
    let n = a.dim();
    let col_ok = deltas
        .par_iter()
        .map(|&d| -> Result<Option<Vec<bool>>> {
            let s = classify_at(a, &spec, lambda0 - d, tol, true)?;
            Ok(s.resolvent.map(|r| {
                (0..n)
                    .map(|k| {
                        let col = r.column(k);
                        let scale = col.max_abs();
                        let ok = col.iter().all(|v| v <= tol * scale);
                        ok
                    })
                    .collect()
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..n)
        .map(|k| {
            let mut reach = 0.0;
            for (d, ok) in deltas.iter().zip(&col_ok) {
                match ok {
                    None => continue,
                    Some(flags) if flags[k] => reach = *d,
                    Some(_) => break,
                }
            }
            reach
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundConfig {
    /// Weight of the discrete pairing `⟨f, u⟩ = weight · Σ f_j u_j`
    /// (the grid spacing for finite-difference operators).
    pub weight: f64,
    /// Largest normalized constant accepted as a uniform bound.
    pub cap: f64,
}

impl Default for KernelBoundConfig {
    fn default() -> Self {
        KernelBoundConfig { weight: 1.0, cap: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundReport {
    pub holds: bool,
    /// Smallest `d` with `(μ₁ - A)⁻¹ e_k ≤ d ⟨e_k, u⟩ u` for every `k`.
    pub d_constant: Option<f64>,
    /// `d · (μ₁ - λ₀) · ‖u‖²`, invariant under rescaling `u` and comparable
    /// across grid sizes; `holds` is `normalized ≤ cap`.
    pub normalized: Option<f64>,
    /// `(k, j)`: basis vector and output index attaining `d` when it fails.
    pub failing_pair: Option<(usize, usize)>,
}

struct KernelSetup {
    r: Matrix,
}

fn kernel_preconditions(
    a: &Matrix,
    u: &Vector,
    lambda0: f64,
    mu1: f64,
    tol: f64,
) -> Result<KernelSetup> {
    let n = a.ensure_square("check_kernel_bound")?;
    if u.dim() != n {
        return Err(Error::Dimension(format!("u has length {} but A is {n}×{n}", u.dim())));
    }
    if a.symmetry_defect() > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::Precondition("A is not self-adjoint (symmetric)".into()));
    }
    if u.min_entry() <= 0.0 {
        return Err(Error::Precondition("u must be strictly positive".into()));
    }
    if !(mu1 > lambda0) {
        return Err(Error::Precondition(format!("need mu1 > lambda0, got mu1 = {mu1}, lambda0 = {lambda0}")));
    }
    let r = resolvent(a, mu1).map_err(|e| match e {
        Error::Singular { .. } => Error::Precondition(format!("mu1 = {mu1} is not in the resolvent set")),
        other => other,
    })?;
    if r.min_entry() < -tol * r.max_abs() {
        return Err(Error::Precondition(format!(
            "resolvent at mu1 = {mu1} is not positive (min entry {:e})",
            r.min_entry()
        )));
    }
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    locate_eigenvalue(&spec, lambda0)?;
    let z0 = Complex::new(lambda0, 0.0);
    let close = spec.eigenvalues.iter().filter(|z| (*z - z0).norm() <= spec.tol_sep).count();
    if close != 1 {
        return Err(Error::Precondition(format!("lambda0 = {lambda0} is not a simple eigenvalue")));
    }
    let idx = spec
        .eigenvalues
        .iter()
        .position(|z| (z - z0).norm() <= spec.tol_sep)
        .expect("located above");
    let v = &spec.right_eigenvectors[idx];
    let ratios: Vec<f64> = (0..n).map(|j| v[j].re / u.get(j)).collect();
    let (rmin, rmax) = ratios.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(*r), hi.max(r.abs())));
    if !(rmin > tol * rmax) {
        return Err(Error::Precondition(
            "eigenvector for lambda0 is not bounded below by a positive multiple of u".into(),
        ));
    }
    Ok(KernelSetup { r })
}

pub fn check_kernel_bound(a: &Matrix, u: &Vector, lambda0: f64, mu1: f64, tol: f64) -> Result<KernelBoundReport> {
    check_kernel_bound_with(a, u, lambda0, mu1, tol, &KernelBoundConfig::default())
}

pub fn check_kernel_bound_with(
    a: &Matrix,
    u: &Vector,
    lambda0: f64,
    mu1: f64,
    tol: f64,
    cfg: &KernelBoundConfig,
) -> Result<KernelBoundReport> {
    if !(cfg.weight > 0.0 && cfg.cap > 0.0) {
        return Err(Error::Domain("kernel bound weight and cap must be positive".into()));
    }
    let KernelSetup { r } = kernel_preconditions(a, u, lambda0, mu1, tol)?;
    Ok(kernel_bound_from(&r, u, lambda0, mu1, cfg))
}

fn kernel_bound_from(r: &Matrix, u: &Vector, lambda0: f64, mu1: f64, cfg: &KernelBoundConfig) -> KernelBoundReport {
    let n = r.dim();
    let mut d = 0.0;
    let mut arg = (0, 0);
    for k in 0..n {
        let pair = cfg.weight * u.get(k);
        for j in 0..n {
            let q = r.get(j, k) / (pair * u.get(j));
            if q > d {
                d = q;
                arg = (k, j);
            }
        }
    }
    let norm2 = cfg.weight * u.dot(u);
    let normalized = d * (mu1 - lambda0) * norm2;
    let holds = normalized <= cfg.cap;
    KernelBoundReport {
        holds,
        d_constant: Some(d),
        normalized: Some(normalized),
        failing_pair: (!holds).then_some(arg),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Uniform anti-maximum principle on the left window.
    pub i_holds: bool,
    /// Kernel bound.
    pub ii_holds: bool,
    pub consistent: bool,
    pub window: f64,
    pub left_window_verdict: LeftVerdict,
    pub kernel: KernelBoundReport,
    /// Largest `c_k` with `|(μ₁ - A)⁻¹ e_k| ≤ c_k u`: the domination of
    /// resolvent columns by `u` that stands in for the smoothing hypothesis.
    pub domination_constant: f64,
}

pub const EQUIVALENCE_SAMPLES: usize = 24;

/// Evaluates both sides of the anti-maximum equivalence and reports whether
/// they agree. Disagreement is returned as data, not as an error.
pub fn antimax_equivalence_test(
    a: &Matrix,
    u: &Vector,
    lambda0: f64,
    mu1: f64,
    tol: f64,
    cfg: &KernelBoundConfig,
) -> Result<EquivalenceReport> {
    let KernelSetup { r } = kernel_preconditions(a, u, lambda0, mu1, tol)?;
    let n = a.dim();
    let mut domination: f64 = 0.0;
    for k in 0..n {
        for j in 0..n {
            domination = domination.max(r.get(j, k).abs() / u.get(j));
        }
    }
    if !domination.is_finite() {
        return Err(Error::Precondition("resolvent columns are not dominated by a multiple of u".into()));
    }
    let window = default_window(a, lambda0)?;
    let sweep = resolvent_sign_sweep(a, lambda0, window, EQUIVALENCE_SAMPLES, tol)?;
    let kernel = kernel_bound_from(&r, u, lambda0, mu1, cfg);
    let i_holds = sweep.left_window_verdict == LeftVerdict::UniformAntiMax;
    Ok(EquivalenceReport {
        i_holds,
        ii_holds: kernel.holds,
        consistent: i_holds == kernel.holds,
        window,
        left_window_verdict: sweep.left_window_verdict,
        kernel,
        domination_constant: domination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_zero() {
        let a = Matrix::zeros(1);
        let p = resolvent_sign_sweep(&a, 0.0, 1.0, 5, 1e-9).unwrap();
        assert_eq!(p.left_window_verdict, LeftVerdict::UniformAntiMax);
        assert_eq!(p.right_window_verdict, RightVerdict::UniformMax);
        assert_eq!(p.sweep_points.len(), 10);
        assert!(p.sweep_points.windows(2).all(|w| w[0] < w[1]));
        let k = check_kernel_bound(&a, &Vector::ones(1), 0.0, 1.0, 1e-9).unwrap();
        assert!(k.holds);
        assert!((k.d_constant.unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_errors() {
        let a = Matrix::from_diagonal(&[0.0, -1.0]).unwrap();
        assert!(matches!(
            resolvent_sign_sweep(&a, 0.0, 0.6, 4, 1e-9),
            Err(Error::Isolation { intruder, .. }) if intruder == -1.0
        ));
        assert!(matches!(resolvent_sign_sweep(&a, 0.5, 0.1, 4, 1e-9), Err(Error::Precondition(_))));
        assert!((default_window(&a, 0.0).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn kernel_preconditions_are_named() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let u = Vector::ones(2);
        match check_kernel_bound(&a, &u, 0.0, 1.0, 1e-9) {
            Err(Error::Precondition(m)) => assert!(m.contains("self-adjoint")),
            other => panic!("{other:?}"),
        }
        let z = Matrix::zeros(2);
        assert!(check_kernel_bound(&z, &Vector::new(vec![1.0, -1.0]).unwrap(), 0.0, 1.0, 1e-9).is_err());
        assert!(check_kernel_bound(&z, &u, 0.0, -1.0, 1e-9).is_err());
        // 0 is a double eigenvalue of the zero matrix
        match check_kernel_bound(&z, &u, 0.0, 1.0, 1e-9) {
            Err(Error::Precondition(m)) => assert!(m.contains("simple")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_has_one_row_per_point() {
        let p = resolvent_sign_sweep(&Matrix::zeros(1), 0.0, 1.0, 3, 1e-9).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().nth(1).unwrap().ends_with("EntrywiseNonpos"));
    }
}
