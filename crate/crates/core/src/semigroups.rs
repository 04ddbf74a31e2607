//! Time evolution: matrix semigroups, the heat and right-shift semigroups
//! with explicit kernels, and Fourier-multiplier semigroups on periodic grids.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, Matrix, Vector};

/// Samples of a function on a uniform 1D grid or a tensor 2D grid.
///
/// In 2D `values[iy * x.len() + ix]` is the sample at `(x[ix], y[iy])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new_1d(x: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let g = GridFunction { x, y: None, values };
        g.validate()?;
        Ok(g)
    }

    pub fn new_2d(x: Vec<f64>, y: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let g = GridFunction { x, y: Some(y), values };
        g.validate()?;
        Ok(g)
    }

    pub fn sample_1d(x: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = x.iter().map(|&s| f(s)).collect();
        Self::new_1d(x, values)
    }

    pub fn sample_2d(x: Vec<f64>, y: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = y.iter().flat_map(|&b| x.iter().map(move |&a| (a, b))).map(|(a, b)| f(a, b)).collect();
        Self::new_2d(x, y, values)
    }

    fn validate(&self) -> Result<()> {
        let expected = self.x.len() * self.y.as_ref().map_or(1, Vec::len);
        if self.x.len() < 2 || self.y.as_ref().is_some_and(|y| y.len() < 2) {
            return Err(Error::Dimension("grid functions need at least 2 points per axis".into()));
        }
        if self.values.len() != expected {
            return Err(Error::Dimension(format!(
                "grid has {expected} points but {} values were given",
                self.values.len()
            )));
        }
        if self.values.iter().chain(&self.x).chain(self.y.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid function contains non-finite entries".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spacing of the x axis (all axes share it for tensor grids built here).
    pub fn spacing(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// `∫|u|` by the rectangle rule.
    pub fn l1_norm(&self) -> f64 {
        let cell = self.spacing().powi(self.dim() as i32);
        cell * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::Dimension("grid functions have different sizes".into()));
        }
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    fn with_values(&self, values: Vec<f64>) -> GridFunction {
        GridFunction {
            x: self.x.clone(),
            y: self.y.clone(),
            values,
        }
    }

    /// CSV with columns `x,value` or `x,y,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.y {
            None => {
                out.push_str("x,value\n");
                for (x, v) in self.x.iter().zip(&self.values) {
                    writeln!(out, "{x},{v}").unwrap();
                }
            }
            Some(y) => {
                out.push_str("x,y,value\n");
                for (iy, b) in y.iter().enumerate() {
                    for (ix, a) in self.x.iter().enumerate() {
                        writeln!(out, "{a},{b},{}", self.values[iy * self.x.len() + ix]).unwrap();
                    }
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
                continue;
            }
            let row = line
                .split(',')
                .enumerate()
                .map(|(col, c)| {
                    c.trim().parse::<f64>().map_err(|e| Error::Parse {
                        location: format!("line {}, column {}", lineno + 1, col + 1),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != 2 && row.len() != 3 || rows.first().is_some_and(|r| r.len() != row.len()) {
                return Err(Error::Parse {
                    location: format!("line {}", lineno + 1),
                    message: "expected 2 or 3 columns, consistently".into(),
                });
            }
            rows.push(row);
        }
        let Some(first) = rows.first() else {
            return Err(Error::Parse {
                location: "input".into(),
                message: "no samples".into(),
            });
        };
        if first.len() == 2 {
            let (x, v) = rows.iter().map(|r| (r[0], r[1])).unzip();
            return Self::new_1d(x, v);
        }
        let mut x: Vec<f64> = Vec::new();
        for r in &rows {
            if r[1] != first[1] {
                break;
            }
            x.push(r[0]);
        }
        let y = rows.iter().step_by(x.len()).map(|r| r[1]).collect();
        let v = rows.iter().map(|r| r[2]).collect();
        Self::new_2d(x, y, v)
    }
}

/// `n` equally spaced points `start, start + h, …` with `h = length / n`
/// (the right endpoint of a periodic box is omitted).
pub fn periodic_axis(start: f64, length: f64, n: usize) -> Vec<f64> {
    let h = length / n as f64;
    (0..n).map(|i| start + h * i as f64).collect()
}

/// `n` equally spaced points covering `[a, b]` including both ends.
pub fn closed_axis(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + h * i as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SemigroupModel {
    /// `e^{tA}` acting on the grid values.
    Matrix(Matrix),
    /// Gaussian kernel `(4πt)^{-d/2} e^{-|x|²/4t}` on the whole space,
    /// integrated by the trapezoidal rule over the grid.
    HeatKernel { dim: u8 },
    /// `(T(t)u)(x) = u(x - t)` for `x ≥ t`, zero before.
    RightShift,
    /// Multiplier `exp(-t |ξ|^{2m})` on a periodic box of side `length`
    /// with `modes` points per axis.
    FourierMultiplier { power: u8, length: f64, modes: usize },
}

impl SemigroupModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            SemigroupModel::Matrix(a) => a.ensure_square("evolve").map(|_| ()),
            SemigroupModel::HeatKernel { dim } if !(1..=2).contains(dim) => {
                Err(Error::Domain(format!("heat kernel dimension must be 1 or 2, got {dim}")))
            }
            SemigroupModel::FourierMultiplier { power, length, modes } => {
                if !(1..=2).contains(power) {
                    return Err(Error::Domain(format!("symbol power must be 1 or 2, got {power}")));
                }
                if !modes.is_power_of_two() || *modes < 2 {
                    return Err(Error::Domain(format!("modes must be a power of two, got {modes}")));
                }
                if !(length.is_finite() && *length > 0.0) {
                    return Err(Error::Domain(format!("box length must be positive, got {length}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// `T(t) u0` for the given model.
pub fn evolve(model: &SemigroupModel, u0: &GridFunction, t: f64) -> Result<GridFunction> {
    model.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    match model {
        SemigroupModel::Matrix(a) => {
            if a.dim() != u0.len() {
                return Err(Error::Dimension(format!(
                    "{}×{} generator cannot act on {} grid values",
                    a.dim(),
                    a.dim(),
                    u0.len()
                )));
            }
            let v = mat_exp(a, t)?.mul_vec(&Vector::new(u0.values.clone())?)?;
            Ok(u0.with_values(v.as_slice().to_vec()))
        }
        SemigroupModel::HeatKernel { dim } => {
            if usize::from(*dim) != u0.dim() {
                return Err(Error::Dimension(format!("{dim}D heat kernel applied to a {}D grid", u0.dim())));
            }
            heat(u0, t)
        }
        SemigroupModel::RightShift => right_shift(u0, t),
        SemigroupModel::FourierMultiplier { power, length, modes } => fourier(u0, t, *power, *length, *modes),
    }
}

fn heat(u0: &GridFunction, t: f64) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let h = u0.spacing();
    if t < h * h / 10.0 {
        return Err(Error::Domain(format!(
            "t = {t} is below h²/10 = {}; the heat kernel is not resolved by the grid",
            h * h / 10.0
        )));
    }
    // Offsets beyond `reach` carry kernel weight below e^{-42}.
    let reach = ((168.0 * t).sqrt() / h).ceil() as usize;
    let norm = h / (4.0 * PI * t).sqrt();
    let weights: Vec<f64> = (0..=reach)
        .map(|k| norm * (-(k as f64 * h).powi(2) / (4.0 * t)).exp())
        .collect();
    let nx = u0.x.len();
    let mut v = u0.values.clone();
    match &u0.y {
        None => v = convolve(&v, &weights),
        Some(y) => {
            for row in v.chunks_mut(nx) {
                let out = convolve(row, &weights);
                row.copy_from_slice(&out);
            }
            let ny = y.len();
            for ix in 0..nx {
                let col: Vec<f64> = (0..ny).map(|iy| v[iy * nx + ix]).collect();
                for (iy, c) in convolve(&col, &weights).into_iter().enumerate() {
                    v[iy * nx + ix] = c;
                }
            }
        }
    }
    Ok(u0.with_values(v))
}

fn convolve(u: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = u.len() as isize;
    let reach = weights.len() as isize - 1;
    (0..n)
        .map(|i| {
            let lo = (i - reach).max(0);
            let hi = (i + reach).min(n - 1);
            (lo..=hi).map(|j| weights[(i - j).unsigned_abs()] * u[j as usize]).sum()
        })
        .collect()
}

fn right_shift(u0: &GridFunction, t: f64) -> Result<GridFunction> {
    if u0.dim() != 1 {
        return Err(Error::Dimension("the right shift acts on 1D grids".into()));
    }
    let h = u0.spacing();
    let k = (t / h).round();
    if (k * h - t).abs() > 1e-9 * t.max(h) {
        return Err(Error::Domain(format!("shift {t} is not a multiple of the grid spacing {h}")));
    }
    let k = k as usize;
    let n = u0.len();
    let values = (0..n).map(|i| if i >= k { u0.values[i - k] } else { 0.0 }).collect();
    Ok(u0.with_values(values))
}

/// Wrapped wavenumber index: `0, 1, …, N/2, -(N/2 - 1), …, -1`.
fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

fn fourier(u0: &GridFunction, t: f64, power: u8, length: f64, modes: usize) -> Result<GridFunction> {
    let axes_ok = u0.x.len() == modes && u0.y.as_ref().is_none_or(|y| y.len() == modes);
    if !axes_ok {
        return Err(Error::Dimension(format!("Fourier model with {modes} modes needs {modes} points per axis")));
    }
    let h = length / modes as f64;
    if (u0.spacing() - h).abs() > 1e-9 * h {
        return Err(Error::Dimension(format!(
            "grid spacing {} does not match box length {length} / {modes}",
            u0.spacing()
        )));
    }
    let symbol = |k: f64| (2.0 * PI * k / length).powi(2);
    let mult = |xi2: f64| (-t * xi2.powi(i32::from(power))).exp();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(modes);
    let inv = planner.plan_fft_inverse(modes);
    let mut buf: Vec<Complex<f64>> = u0.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let scale = if u0.y.is_none() {
        fwd.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            *c *= mult(symbol(wavenumber(k, modes)));
        }
        inv.process(&mut buf);
        modes as f64
    } else {
        let n = modes;
        for row in buf.chunks_mut(n) {
            fwd.process(row);
        }
        transpose_in_place(&mut buf, n);
        for row in buf.chunks_mut(n) {
            fwd.process(row);
        }
        // buf is now indexed [kx * n + ky]
        for (idx, c) in buf.iter_mut().enumerate() {
            let (kx, ky) = (idx / n, idx % n);
            *c *= mult(symbol(wavenumber(kx, n)) + symbol(wavenumber(ky, n)));
        }
        for row in buf.chunks_mut(n) {
            inv.process(row);
        }
        transpose_in_place(&mut buf, n);
        for row in buf.chunks_mut(n) {
            inv.process(row);
        }
        (n * n) as f64
    };
    let residue = buf.iter().fold(0.0_f64, |m, c| m.max(c.im.abs())) / scale;
    if residue > 1e-10 * u0.sup_norm().max(1.0) {
        return Err(Error::Domain(format!("inverse transform left an imaginary residue of {residue:e}")));
    }
    Ok(u0.with_values(buf.iter().map(|c| c.re / scale).collect()))
}

fn transpose_in_place(buf: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// `‖T(t)u0 − mean(u0)‖_∞` for a Fourier-multiplier model.
pub fn mean_projection_check(model: &SemigroupModel, u0: &GridFunction, t_large: f64) -> Result<f64> {
    if !matches!(model, SemigroupModel::FourierMultiplier { .. }) {
        return Err(Error::Precondition("mean projection is defined for Fourier-multiplier models".into()));
    }
    let mean = u0.mean();
    let u = evolve(model, u0, t_large)?;
    Ok(u.values.iter().fold(0.0, |m, v| m.max((v - mean).abs())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPositivityReport {
    pub window: (f64, f64),
    /// First sampled time from which the minimum over the window stays
    /// `≥ -tol` through the last sample.
    pub onset_time: Option<f64>,
    pub persistence_checked_until: f64,
    pub min_value_trace: Vec<(f64, f64)>,
}

impl LocalPositivityReport {
    /// Whether some sample before the onset (or any sample, without onset)
    /// dips below `-tol`.
    pub fn has_negative_excursion(&self, tol: f64) -> bool {
        self.min_value_trace
            .iter()
            .take_while(|(t, _)| self.onset_time.is_none_or(|t0| *t < t0))
            .any(|&(_, m)| m < -tol)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,min_over_window\n");
        for (t, m) in &self.min_value_trace {
            writeln!(out, "{t},{m}").unwrap();
        }
        out
    }
}

/// Fraction of the box, measured from each edge, watched for wraparound.
pub const EDGE_ZONE: f64 = 0.05;
/// Allowed total variation in the edge zone relative to `‖u0‖₁`.
pub const CONTAMINATION_LIMIT: f64 = 1e-8;

/// Tracks `min_{x ∈ K} (T(t)u0)(x)` over `t_grid` for a window `K`
/// (an interval, or its square in 2D).
///
/// Each sample also checks that the solution stays negligible near the box
/// edge, so periodic images cannot fake positivity.
pub fn local_positivity_probe(
    model: &SemigroupModel,
    u0: &GridFunction,
    window: (f64, f64),
    t_grid: &[f64],
    tol: f64,
) -> Result<LocalPositivityReport> {
    if u0.min() < 0.0 {
        return Err(Error::Precondition("initial datum must be nonnegative".into()));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < 0.0 {
        return Err(Error::Domain("time grid must be nonempty, nonnegative and increasing".into()));
    }
    let (lo, hi) = window;
    let (x0, x1) = (u0.x[0], *u0.x.last().unwrap());
    let box_len = x1 - x0 + u0.spacing();
    let edge = EDGE_ZONE * box_len;
    if !(lo < hi && lo >= x0 + edge && hi <= x1 - edge) {
        return Err(Error::Domain(format!("window [{lo}, {hi}] must lie inside the box away from its edges")));
    }
    let limit = CONTAMINATION_LIMIT * u0.l1_norm();
    let in_edge = |x: f64| x < x0 + edge || x > x1 - edge;
    let in_window = |x: f64| x >= lo && x <= hi;

    let samples = t_grid
        .par_iter()
        .map(|&t| -> Result<(f64, f64)> {
            let u = evolve(model, u0, t)?;
            let variation = edge_variation(&u, &in_edge);
            if variation > limit {
                return Err(Error::Truncation { t, variation, limit });
            }
            Ok((t, window_min(&u, &in_window)))
        })
        .collect::<Vec<_>>();
    let mut trace = Vec::with_capacity(samples.len());
    for s in samples {
        trace.push(s?);
    }
    let onset_idx = trace.iter().rposition(|&(_, m)| m < -tol).map_or(0, |i| i + 1);
    Ok(LocalPositivityReport {
        window,
        onset_time: trace.get(onset_idx).map(|s| s.0),
        persistence_checked_until: *t_grid.last().unwrap(),
        min_value_trace: trace,
    })
}

fn window_min(u: &GridFunction, in_window: &impl Fn(f64) -> bool) -> f64 {
    let nx = u.x.len();
    let mut m = f64::INFINITY;
    match &u.y {
        None => {
            for (x, v) in u.x.iter().zip(&u.values) {
                if in_window(*x) {
                    m = m.min(*v);
                }
            }
        }
        Some(y) => {
            for (iy, b) in y.iter().enumerate() {
                if !in_window(*b) {
                    continue;
                }
                for (ix, a) in u.x.iter().enumerate() {
                    if in_window(*a) {
                        m = m.min(u.values[iy * nx + ix]);
                    }
                }
            }
        }
    }
    m
}

/// Total variation of `u` between neighbouring points that both lie in the
/// edge zone (along every axis).
fn edge_variation(u: &GridFunction, in_edge: &impl Fn(f64) -> bool) -> f64 {
    let nx = u.x.len();
    match &u.y {
        None => (1..nx)
            .filter(|&i| in_edge(u.x[i]) && in_edge(u.x[i - 1]))
            .map(|i| (u.values[i] - u.values[i - 1]).abs())
            .sum(),
        Some(y) => {
            let ny = y.len();
            let at = |ix: usize, iy: usize| u.values[iy * nx + ix];
            let zone = |ix: usize, iy: usize| in_edge(u.x[ix]) || in_edge(y[iy]);
            let mut tv = 0.0;
            for iy in 0..ny {
                for ix in 0..nx {
                    if ix > 0 && zone(ix, iy) && zone(ix - 1, iy) {
                        tv += (at(ix, iy) - at(ix - 1, iy)).abs();
                    }
                    if iy > 0 && zone(ix, iy) && zone(ix, iy - 1) {
                        tv += (at(ix, iy) - at(ix, iy - 1)).abs();
                    }
                }
            }
            tv
        }
    }
}

/// The Fourier multiplier `-(|ξ|²)^m` on `modes` nodes of a periodic interval,
/// written as a real circulant matrix on nodal values. Its exponential agrees
/// with [`evolve`] for the corresponding `FourierMultiplier` model.
pub fn realified_fourier_generator(power: u8, length: f64, modes: usize) -> Result<Matrix> {
    SemigroupModel::FourierMultiplier { power, length, modes }.validate()?;
    let n = modes;
    let symbol: Vec<f64> = (0..n)
        .map(|k| -(2.0 * PI * wavenumber(k, n) / length).powi(2 * i32::from(power)))
        .collect();
    let coeff: Vec<f64> = (0..=n / 2)
        .map(|d| {
            symbol
                .iter()
                .enumerate()
                .map(|(k, s)| s * (2.0 * PI * (k * d % n) as f64 / n as f64).cos())
                .sum::<f64>()
                / n as f64
        })
        .collect();
    Matrix::from_fn(n, n, |j, l| {
        let d = j.abs_diff(l);
        coeff[d.min(n - d)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_shift_moves_indicator() {
        let x = closed_axis(0.0, 10.0, 1001);
        let u0 = GridFunction::sample_1d(x, |s| if s <= 1.0 { 1.0 } else { 0.0 }).unwrap();
        let u = evolve(&SemigroupModel::RightShift, &u0, 2.0).unwrap();
        for (x, v) in u.x.iter().zip(&u.values) {
            let expected = if (2.0 - 1e-9..=3.0 + 1e-9).contains(x) { 1.0 } else { 0.0 };
            assert_eq!(*v, expected, "x = {x}");
        }
        assert!(evolve(&SemigroupModel::RightShift, &u0, 0.0105).is_err());
    }

    #[test]
    fn fourier_constant_is_invariant() {
        let model = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: 64 };
        let u0 = GridFunction::sample_1d(periodic_axis(0.0, 1.0, 64), |_| 1.0).unwrap();
        for t in [0.0, 0.01, 3.0] {
            let u = evolve(&model, &u0, t).unwrap();
            assert!(u.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
            assert!(mean_projection_check(&model, &u0, t).unwrap() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let u0 = GridFunction::sample_1d(periodic_axis(0.0, 1.0, 64), |_| 1.0).unwrap();
        let bad_modes = SemigroupModel::FourierMultiplier { power: 2, length: 1.0, modes: 48 };
        assert!(evolve(&bad_modes, &u0, 1.0).is_err());
        let wrong_len = SemigroupModel::FourierMultiplier { power: 2, length: 2.0, modes: 64 };
        assert!(matches!(evolve(&wrong_len, &u0, 1.0), Err(Error::Dimension(_))));
        let heat = SemigroupModel::HeatKernel { dim: 1 };
        assert!(matches!(evolve(&heat, &u0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(evolve(&heat, &u0, 1e-6), Err(Error::Domain(_))));
        let a = SemigroupModel::Matrix(Matrix::zeros(3));
        assert!(matches!(evolve(&a, &u0, 1.0), Err(Error::Dimension(_))));
        assert!(GridFunction::new_1d(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn grid_function_csv_round_trip() {
        let g = GridFunction::sample_2d(vec![0.0, 0.5, 1.0], vec![0.0, 0.25], |a, b| a + 10.0 * b).unwrap();
        assert_eq!(GridFunction::from_csv(&g.to_csv()).unwrap(), g);
        let g = GridFunction::sample_1d(vec![0.0, 0.1, 0.2], |a| a * a).unwrap();
        assert_eq!(GridFunction::from_csv(&g.to_csv()).unwrap(), g);
        assert!(GridFunction::from_csv("x,value\n0,1\n1\n").is_err());
    }

    #[test]
    fn realified_generator_is_symmetric_with_constant_kernel() {
        let a = realified_fourier_generator(2, 1.0, 16).unwrap();
        assert_eq!(a.symmetry_defect(), 0.0);
        for s in a.row_sums() {
            assert!(s.abs() < 1e-6 * a.max_abs());
        }
    }
}
