//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection follows Higham's 2005 bounds on the 1-norm: the lowest
//! degree in {3, 5, 7, 9} whose threshold covers `‖tA‖₁` is used directly,
//! otherwise the degree-13 approximant is applied to `tA / 2^s` and squared
//! `s` times.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17_297_280.0,
    8_648_640.0,
    1_995_840.0,
    277_200.0,
    25_200.0,
    1_512.0,
    56.0,
    1.0,
];
const B9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `e^{tA}`. Returns the identity exactly at `t = 0`.
pub fn mat_exp(a: &Matrix, t: f64) -> Result<Matrix> {
    let n = a.ensure_square("mat_exp")?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("mat_exp needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let scaled = a.as_dmatrix() * t;
    let e = expm_dense(&scaled)?;
    Matrix::from_dmatrix(e).map_err(|_| {
        Error::Domain(format!("e^(tA) overflowed at t = {t} (‖A‖₁ = {:e})", a.norm1()))
    })
}

pub(crate) fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Exponential of an already scaled dense matrix.
pub(crate) fn expm_dense(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let nrm = norm1(a);
    if !nrm.is_finite() {
        return Err(Error::Domain("non-finite matrix in exponential".into()));
    }
    let n = a.nrows();
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;

    for &(m, theta) in &THETA {
        if nrm <= theta {
            let (u, v) = match m {
                3 => low_order(a, &a2, &ident, &B3),
                5 => low_order(a, &a2, &ident, &B5),
                7 => low_order(a, &a2, &ident, &B7),
                _ => low_order(a, &a2, &ident, &B9),
            };
            return solve_pade(u, v);
        }
    }

    let s = ((nrm / THETA_13).log2().ceil()).max(0.0) as i32;
    let factor = 2f64.powi(-s);
    let a = a * factor;
    let a2 = a2 * (factor * factor);
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &B13;

    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]);
    let u = &a * (inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let inner_v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]);
    let v = inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];

    let mut r = solve_pade(u, v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn low_order(
    a: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    ident: &DMatrix<f64>,
    b: &[f64],
) -> (DMatrix<f64>, DMatrix<f64>) {
    // even powers A^0, A^2, A^4, ...
    let mut odd = ident * b[1];
    let mut even = ident * b[0];
    let mut pow = ident.clone();
    for k in 1..b.len() / 2 {
        pow = &pow * a2;
        odd += &pow * b[2 * k + 1];
        even += &pow * b[2 * k];
    }
    (a * odd, even)
}

fn solve_pade(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Domain("singular Padé denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = Matrix::zeros(3);
        for t in [0.0, 0.5, 7.0] {
            assert_eq!(mat_exp(&z, t).unwrap(), Matrix::identity(3));
        }
    }

    #[test]
    fn nilpotent_series_truncates() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let e = mat_exp(&a, 2.0).unwrap();
        let want = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(close(&e, &want, 1e-14), "{e:?}");
    }

    #[test]
    fn scalar_matches_exp_across_degrees() {
        for x in [1e-3, 0.1, 0.5, 1.5, 3.0, 40.0, -40.0] {
            let a = Matrix::from_rows(&[[x]]).unwrap();
            let e = mat_exp(&a, 1.0).unwrap().get(0, 0);
            assert!(((e - x.exp()) / x.exp()).abs() < 1e-13, "x={x}: {e}");
        }
    }

    #[test]
    fn rotation_generator() {
        let a = Matrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let t = 2.3f64;
        let e = mat_exp(&a, t).unwrap();
        let want = Matrix::from_rows(&[[t.cos(), -t.sin()], [t.sin(), t.cos()]]).unwrap();
        assert!(close(&e, &want, 1e-13));
    }

    #[test]
    fn rejects_bad_input() {
        let rect = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(mat_exp(&rect, 1.0), Err(Error::Dimension(_))));
        let a = Matrix::identity(2);
        assert!(matches!(mat_exp(&a, -1.0), Err(Error::Domain(_))));
        assert!(matches!(mat_exp(&a, f64::NAN), Err(Error::Domain(_))));
        assert!(Matrix::from_rows(&[[f64::INFINITY]]).is_err());
    }
}
