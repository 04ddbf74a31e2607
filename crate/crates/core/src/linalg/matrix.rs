use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real matrix with finite entries.
///
/// Serializes as `{rows, cols, entries}` with `entries` in row-major order.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix(DMatrix<f64>);

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        Matrix::from_row_major(r.rows, r.cols, r.entries)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        MatrixRepr {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_row_major(),
        }
    }
}

impl Matrix {
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension("matrix must have at least one row and column".into()));
        }
        if let Some((i, v)) = m.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            let (j, k) = (i % m.nrows(), i / m.nrows());
            return Err(Error::Domain(format!("non-finite entry {v} at ({j}, {k})")));
        }
        Ok(Matrix(m))
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let entries = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_row_major(rows.len(), ncols, entries)
    }

    pub fn zeros(n: usize) -> Self {
        Matrix(DMatrix::zeros(n.max(1), n.max(1)))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n.max(1), n.max(1)))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Rank-one matrix `x yᵀ`.
    pub fn outer(x: &Vector, y: &Vector) -> Result<Self> {
        Self::from_dmatrix(x.as_dvector() * y.as_dvector().transpose())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    pub fn ensure_square(&self, op: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::Dimension(format!(
                "{op} needs a square matrix, got {}x{}",
                self.rows(),
                self.cols()
            )))
        }
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for j in 0..self.rows() {
            out.extend(self.0.row(j).iter());
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix(&self.0 * s)
    }

    /// `self + s·I`.
    pub fn shift(&self, s: f64) -> Matrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows().min(m.ncols()) {
            m[(i, i)] += s;
        }
        Matrix(m)
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn min_entry(&self) -> f64 {
        self.0.min()
    }

    pub fn max_entry(&self) -> f64 {
        self.0.max()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.0.row_iter().map(|r| r.sum()).collect()
    }

    /// `max |a_jk - a_kj|`.
    pub fn symmetry_defect(&self) -> f64 {
        (&self.0 - self.0.transpose()).amax()
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector> {
        if v.dim() != self.cols() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows(),
                self.cols(),
                v.dim()
            )));
        }
        Vector::from_dvector(&self.0 * v.as_dvector())
    }

    pub fn column(&self, k: usize) -> Vector {
        Vector(self.0.column(k).into_owned())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows(), self.cols())?;
        for row in self.0.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>12.6e}")).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.cols(), rhs.rows(), "matrix product dimension mismatch");
        Matrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn add(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &'a Matrix) -> Matrix {
        Matrix(&self.0 - &rhs.0)
    }
}

/// Dense real vector with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(DVector<f64>);

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0.as_slice().to_vec()
    }
}

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(entries))
    }

    pub fn from_dvector(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Dimension("vector must be non-empty".into()));
        }
        if let Some((i, x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite entry {x} at {i}")));
        }
        Ok(Vector(v))
    }

    pub fn ones(n: usize) -> Self {
        Vector(DVector::from_element(n.max(1), 1.0))
    }

    /// Canonical unit vector `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = DVector::zeros(n.max(1));
        v[j] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn min_entry(&self) -> f64 {
        self.0.min()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(&self.0 * s)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().copied()
    }
}
