//! Dense linear algebra substrate: matrices, exponentials, spectra, resolvents.

mod eigen;
mod expm;
mod matrix;

pub use eigen::{eig, mat_exp_eig, Spectrum, DEFAULT_TOL_SEP, DIM_CAP};
pub use expm::mat_exp;
pub use matrix::{Matrix, Vector};

pub(crate) use expm::expm_dense;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-13;

/// `(λI - A)⁻¹`, with one step of iterative refinement.
///
/// Fails with [`Error::Singular`] when an LU pivot falls below
/// `1e-13 · ‖λI - A‖_max`; the error carries the nearest eigenvalue of `A`.
pub fn resolvent(a: &Matrix, lambda: f64) -> Result<Matrix> {
    let n = a.ensure_square("resolvent")?;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("resolvent point must be finite, got {lambda}")));
    }
    let mut m = -a.as_dmatrix().clone();
    for i in 0..n {
        m[(i, i)] += lambda;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let lu = m.clone().lu();
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |acc, p| acc.min(p.abs()));
    let singular = || -> Error {
        let nearest = eig(a, DEFAULT_TOL_SEP)
            .map(|s| s.nearest(Complex::new(lambda, 0.0)).1)
            .unwrap_or(Complex::new(f64::NAN, f64::NAN));
        Error::Singular { lambda, nearest }
    };
    if min_pivot <= PIVOT_TOL * scale {
        return Err(singular());
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let mut x = lu.solve(&ident).ok_or_else(singular)?;
    let r = &ident - &m * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    Matrix::from_dmatrix(x).map_err(|_| singular())
}

/// Exponential growth rate of `‖e^{tA}‖`, estimated as the least-squares
/// slope of `log ‖e^{tA}‖_F` over the later half of `samples` equally spaced
/// times in `(0, t_max]`.
///
/// In finite dimensions this converges to the spectral bound; the estimate is
/// good once `e^{-gap · t_max / 2}` is negligible.
pub fn estimate_growth_bound(a: &Matrix, t_max: f64, samples: usize) -> Result<f64> {
    let n = a.ensure_square("estimate_growth_bound")?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
    }
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let dt = t_max / samples as f64;
    let step = mat_exp(a, dt).map_err(|_| Error::Scale { t: dt })?.into_dmatrix();
    // Track e^{tA} = scale · current with `current` renormalized each step.
    let mut current = DMatrix::<f64>::identity(n, n);
    let mut log_scale = 0.0;
    let mut points = Vec::with_capacity(samples);
    for i in 1..=samples {
        current = &current * &step;
        let nrm = current.norm();
        let t = dt * i as f64;
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Scale { t });
        }
        log_scale += nrm.ln();
        current /= nrm;
        points.push((t, log_scale));
    }
    let tail = &points[samples / 2..];
    Ok(ls_slope(tail))
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let cov: f64 = points.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mt).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolvent_of_zero_and_diagonal() {
        let r = resolvent(&Matrix::zeros(2), 2.0).unwrap();
        assert_eq!(r, Matrix::identity(2).scale(0.5));
        let a = Matrix::from_diagonal(&[-1.0, -4.0]).unwrap();
        let r = resolvent(&a, 0.0).unwrap();
        assert!((r.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((r.get(1, 1) - 0.25).abs() < 1e-15);
        assert_eq!(r.get(0, 1), 0.0);
    }

    #[test]
    fn resolvent_in_spectrum_reports_nearest_eigenvalue() {
        let a = Matrix::from_diagonal(&[-1.0, -4.0]).unwrap();
        match resolvent(&a, -4.0) {
            Err(Error::Singular { lambda, nearest }) => {
                assert_eq!(lambda, -4.0);
                assert!((nearest.re + 4.0).abs() < 1e-12);
            }
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn growth_bound_of_diagonal() {
        let a = Matrix::from_diagonal(&[-1.0, -2.0]).unwrap();
        let g = estimate_growth_bound(&a, 30.0, 60).unwrap();
        assert!((g + 1.0).abs() < 1e-6, "{g}");
    }

    #[test]
    fn growth_bound_errors() {
        let a = Matrix::identity(2);
        assert!(estimate_growth_bound(&a, 0.0, 10).is_err());
        assert!(estimate_growth_bound(&a, 1.0, 1).is_err());
        let big = Matrix::from_diagonal(&[1e3]).unwrap();
        assert!(matches!(estimate_growth_bound(&big, 10.0, 2), Err(Error::Scale { .. })));
    }
}
