use nalgebra::{Complex, DMatrix, DVector, Schur, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Largest dimension accepted by the dense eigensolver.
pub const DIM_CAP: usize = 4096;

/// Default relative separation tolerance: eigenvalues closer than
/// `DEFAULT_TOL_SEP · ‖A‖_max` are treated as coinciding.
pub const DEFAULT_TOL_SEP: f64 = 1e-7;

const SYMMETRY_TOL: f64 = 1e-13;

/// Full eigendecomposition of a real square matrix.
///
/// Eigenvalues are ordered by decreasing real part, ties broken by decreasing
/// imaginary part, so index 0 always attains the spectral bound. Right and
/// left eigenvectors have unit Euclidean norm and are phased so that their
/// largest-modulus component is real and positive.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex<f64>>,
    pub right_eigenvectors: Vec<Vec<Complex<f64>>>,
    pub left_eigenvectors: Vec<Vec<Complex<f64>>>,
    pub spectral_bound: f64,
    /// Index of the unique eigenvalue attaining the spectral bound, if unique.
    pub dominant_index: Option<usize>,
    /// `spb(A)` minus the largest real part among the remaining eigenvalues.
    pub dominance_gap: f64,
    pub simple_dominant: bool,
    /// Absolute separation threshold actually used.
    pub tol_sep: f64,
    /// Rank deficiency of `A - λ₀I` for the leading eigenvalue.
    pub leading_geometric_multiplicity: usize,
    pub symmetric: bool,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn leading(&self) -> Complex<f64> {
        self.eigenvalues[0]
    }

    /// Eigenvalues as `(re, im)` pairs.
    pub fn eigenvalue_pairs(&self) -> Vec<(f64, f64)> {
        self.eigenvalues.iter().map(|z| (z.re, z.im)).collect()
    }

    /// Real part of the leading right eigenvector, provided the leading
    /// eigenvalue is real.
    pub fn leading_right_real(&self) -> Option<Vector> {
        self.real_vector(&self.right_eigenvectors[0])
    }

    pub fn leading_left_real(&self) -> Option<Vector> {
        self.real_vector(&self.left_eigenvectors[0])
    }

    fn real_vector(&self, v: &[Complex<f64>]) -> Option<Vector> {
        if self.leading().im.abs() > self.tol_sep {
            return None;
        }
        Vector::new(v.iter().map(|z| z.re).collect()).ok()
    }

    /// Rank-one spectral projection `v wᵀ / (wᵀ v)` onto the leading
    /// eigenvector, when the leading eigenvalue is real and simple.
    pub fn perron_projection(&self) -> Option<Matrix> {
        if !self.simple_dominant {
            return None;
        }
        let v = self.leading_right_real()?;
        let w = self.leading_left_real()?;
        let pairing = w.dot(&v);
        if pairing.abs() <= f64::EPSILON {
            return None;
        }
        Matrix::outer(&v, &w).ok().map(|p| p.scale(1.0 / pairing))
    }

    /// Distance from `z` to the nearest eigenvalue, and that eigenvalue.
    pub fn nearest(&self, z: Complex<f64>) -> (f64, Complex<f64>) {
        self.eigenvalues
            .iter()
            .map(|&e| ((e - z).norm(), e))
            .fold((f64::INFINITY, Complex::new(f64::NAN, f64::NAN)), |best, c| {
                if c.0 < best.0 {
                    c
                } else {
                    best
                }
            })
    }
}

/// Eigendecomposition with relative separation tolerance `tol`.
///
/// Symmetric input goes through the symmetric QR algorithm (left and right
/// eigenvectors coincide); everything else through a real Schur form with
/// eigenvectors recovered by complex inverse iteration on `A` and `Aᵀ`.
pub fn eig(a: &Matrix, tol: f64) -> Result<Spectrum> {
    let n = a.ensure_square("eig")?;
    if n > DIM_CAP {
        return Err(Error::Dimension(format!("eig dimension {n} exceeds the cap {DIM_CAP}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("eig tolerance must be positive, got {tol}")));
    }
    let scale = a.max_abs();
    let tol_sep = tol * if scale > 0.0 { scale } else { 1.0 };
    let symmetric = a.symmetry_defect() <= SYMMETRY_TOL * scale;
    let max_iter = 300 * n.max(10);

    let (values, right, left) = if symmetric {
        let m = a.as_dmatrix().clone();
        let se = SymmetricEigen::try_new(m, f64::EPSILON, max_iter)
            .ok_or(Error::NoConvergence { iterations: max_iter })?;
        let values: Vec<Complex<f64>> = se.eigenvalues.iter().map(|&x| Complex::new(x, 0.0)).collect();
        let vecs: Vec<Vec<Complex<f64>>> = se
            .eigenvectors
            .column_iter()
            .map(|c| normalize(c.iter().map(|&x| Complex::new(x, 0.0)).collect()))
            .collect();
        (values, vecs.clone(), vecs)
    } else {
        let schur = Schur::try_new(a.as_dmatrix().clone(), f64::EPSILON, max_iter)
            .ok_or(Error::NoConvergence { iterations: max_iter })?;
        let values: Vec<Complex<f64>> = schur.complex_eigenvalues().iter().copied().collect();
        let ac = to_complex(a.as_dmatrix());
        let atc = to_complex(&a.as_dmatrix().transpose());
        let right = eigenvectors_for(&ac, &values, scale);
        let left = eigenvectors_for(&atc, &values, scale);
        (values, right, left)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (x, y) = (values[i], values[j]);
        y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im))
    });
    let eigenvalues: Vec<Complex<f64>> = order.iter().map(|&i| values[i]).collect();
    let right_eigenvectors: Vec<_> = order.iter().map(|&i| right[i].clone()).collect();
    let left_eigenvectors: Vec<_> = order.iter().map(|&i| left[i].clone()).collect();

    let spectral_bound = eigenvalues[0].re;
    let attaining = eigenvalues
        .iter()
        .filter(|z| z.re >= spectral_bound - tol_sep)
        .count();
    let dominant_index = (attaining == 1).then_some(0);
    let dominance_gap = eigenvalues
        .iter()
        .skip(1)
        .map(|z| spectral_bound - z.re)
        .fold(f64::INFINITY, f64::min);
    let separated = eigenvalues
        .iter()
        .skip(1)
        .all(|z| (z - eigenvalues[0]).norm() > tol_sep);
    let leading_real = eigenvalues[0].im.abs() <= tol_sep;
    let leading_geometric_multiplicity = if leading_real {
        rank_deficiency(a.as_dmatrix(), eigenvalues[0].re, tol_sep)
    } else {
        1
    };
    let simple_dominant =
        dominant_index.is_some() && leading_real && separated && leading_geometric_multiplicity == 1;

    Ok(Spectrum {
        eigenvalues,
        right_eigenvectors,
        left_eigenvectors,
        spectral_bound,
        dominant_index,
        dominance_gap,
        simple_dominant,
        tol_sep,
        leading_geometric_multiplicity,
        symmetric,
    })
}

/// Number of singular values of `A - λI` at or below `tol`.
pub(crate) fn rank_deficiency(a: &DMatrix<f64>, lambda: f64, tol: f64) -> usize {
    let mut m = a.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    let sv = SVD::new(m, false, false).singular_values;
    sv.iter().filter(|&&s| s <= tol).count()
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    m.map(|x| Complex::new(x, 0.0))
}

fn normalize(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v;
    }
    let pivot = v
        .iter()
        .copied()
        .fold(Complex::new(0.0, 0.0), |best, z| if z.norm() > best.norm() * (1.0 + 1e-12) { z } else { best });
    let phase = pivot.conj() / pivot.norm();
    for z in &mut v {
        *z = *z * phase / norm;
    }
    v
}

fn eigenvectors_for(
    a: &DMatrix<Complex<f64>>,
    values: &[Complex<f64>],
    scale: f64,
) -> Vec<Vec<Complex<f64>>> {
    let mut out: Vec<Option<Vec<Complex<f64>>>> = vec![None; values.len()];
    for (i, &lambda) in values.iter().enumerate() {
        if out[i].is_some() {
            continue;
        }
        let v = inverse_iteration(a, lambda, scale);
        // conjugate partner of a complex eigenvalue of a real matrix
        if lambda.im.abs() > 0.0 {
            if let Some(j) = (i + 1..values.len())
                .find(|&j| out[j].is_none() && (values[j] - lambda.conj()).norm() <= 1e-12 * scale.max(1.0))
            {
                out[j] = Some(normalize(v.iter().map(|z| z.conj()).collect()));
            }
        }
        out[i] = Some(v);
    }
    out.into_iter().map(|v| v.unwrap_or_default()).collect()
}

fn inverse_iteration(a: &DMatrix<Complex<f64>>, lambda: Complex<f64>, scale: f64) -> Vec<Complex<f64>> {
    let n = a.nrows();
    let mut shift = lambda + Complex::new(1e-12 * scale.max(1e-300), 0.0);
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= shift;
    }
    let mut lu = m.clone().lu();
    if !lu.is_invertible() {
        shift += Complex::new(1e-9 * scale.max(1e-300), 0.0);
        m = a.clone();
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        lu = m.lu();
    }
    let mut x = DVector::from_fn(n, |j, _| Complex::new(1.0 + 0.1 * ((j * 7 + 3) % 11) as f64, 0.0));
    let residual = |x: &DVector<Complex<f64>>| (a * x - x * lambda).norm() / x.norm().max(f64::MIN_POSITIVE);
    for it in 0..12 {
        if let Some(y) = lu.solve(&x) {
            let nrm = y.norm();
            if !nrm.is_finite() || nrm == 0.0 {
                break;
            }
            x = y / Complex::new(nrm, 0.0);
        }
        if it >= 2 && residual(&x) <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    normalize(x.iter().copied().collect())
}

/// `e^{tA}` through the eigendecomposition. Only meaningful for
/// diagonalizable `A` with a well-conditioned eigenvector basis; used as an
/// independent cross-check of [`crate::linalg::mat_exp`].
pub fn mat_exp_eig(a: &Matrix, t: f64) -> Result<Matrix> {
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    let n = spec.dim();
    let v = DMatrix::from_fn(n, n, |j, k| spec.right_eigenvectors[k][j]);
    let vinv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Precondition("eigenvector basis is singular (defective matrix)".into()))?;
    let d = DMatrix::from_diagonal(&DVector::from_iterator(n, spec.eigenvalues.iter().map(|z| (z * t).exp())));
    let e = v * d * vinv;
    Matrix::from_dmatrix(e.map(|z| z.re))
}
