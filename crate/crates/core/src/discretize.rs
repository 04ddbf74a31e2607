//! Finite-difference generators for 1D second- and fourth-order operators.
//!
//! Boundary conditions are folded into the boundary rows by eliminating ghost
//! points, which keeps the self-adjoint realizations symmetric. Grids for
//! Dirichlet and clamped conditions hold interior points only; Neumann and
//! nonlocal grids include both endpoints. On grids that include endpoints the
//! trapezoidal weights make the operator self-adjoint, and the returned
//! matrix is the symmetric form `W^{1/2} D W^{-1/2}` (a positive diagonal
//! similarity, so spectra and sign patterns of `e^{tA}` and resolvents are
//! unchanged).

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig, Matrix, Vector, DEFAULT_TOL_SEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    #[serde(alias = "dirichlet")]
    Dirichlet,
    #[serde(alias = "neumann")]
    Neumann,
    #[serde(alias = "periodic")]
    Periodic,
    /// `v'(a) = -v'(b) = v(a) + v(b)`.
    #[serde(alias = "nonlocal", alias = "nonlocal-sum")]
    NonlocalSum,
    /// `v = v' = 0` at both ends.
    #[serde(alias = "clamped")]
    Clamped,
}

fn default_a() -> f64 {
    0.0
}

fn default_b() -> f64 {
    1.0
}

/// A 1D differential operator with boundary conditions.
///
/// `sign` multiplies the principal part; it defaults to `+1` for `v''` and
/// `-1` for `-v''''`, the dissipative choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub order: u8,
    pub bc: BoundaryCondition,
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_b")]
    pub b: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl OperatorSpec {
    pub fn new(order: u8, bc: BoundaryCondition, n: usize) -> Self {
        OperatorSpec {
            order,
            bc,
            a: 0.0,
            b: 1.0,
            n,
            sign: None,
        }
    }

    pub fn on_interval(mut self, a: f64, b: f64) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn effective_sign(&self) -> f64 {
        match (self.sign, self.order) {
            (Some(s), _) => f64::from(s),
            (None, 4) => -1.0,
            (None, _) => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        use BoundaryCondition::*;
        if self.n < 4 {
            return Err(Error::Spec(format!("need n >= 4 grid points, got {}", self.n)));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.b > self.a) {
            return Err(Error::Spec(format!("invalid interval ({}, {})", self.a, self.b)));
        }
        if let Some(s) = self.sign {
            if s != 1 && s != -1 {
                return Err(Error::Spec(format!("sign must be +1 or -1, got {s}")));
            }
        }
        match (self.order, self.bc) {
            (2, Dirichlet | Neumann | Periodic | NonlocalSum) | (4, Clamped | Periodic) => Ok(()),
            (o, bc) => Err(Error::Spec(format!("order {o} with {bc:?} boundary conditions is not supported"))),
        }
    }

    /// Whether the continuum realization is self-adjoint (all supported ones are).
    pub fn is_self_adjoint(&self) -> bool {
        self.validate().is_ok()
    }
}

/// Uniform 1D grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub points: Vec<f64>,
    pub h: f64,
    /// Distance of each point to the nearer endpoint of the interval.
    pub boundary_distance: Vec<f64>,
}

impl Grid {
    fn new(a: f64, b: f64, h: f64, indices: impl Iterator<Item = usize>) -> Self {
        let points: Vec<f64> = indices.map(|i| a + h * i as f64).collect();
        let boundary_distance = points.iter().map(|&x| (x - a).min(b - x).max(0.0)).collect();
        Grid {
            points,
            h,
            boundary_distance,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weight of the discrete `L²` pairing `⟨f, g⟩ = h Σ f_j g_j`.
    pub fn weight(&self) -> f64 {
        self.h
    }

    /// `d(x)²`; strictly positive on interior-only grids.
    pub fn distance_squared(&self) -> Result<Vector> {
        Vector::new(self.boundary_distance.iter().map(|d| d * d).collect())
    }
}

/// Assembles the finite-difference generator and its grid.
pub fn build_operator(spec: &OperatorSpec) -> Result<(Matrix, Grid)> {
    use BoundaryCondition::*;
    spec.validate()?;
    let (a, b, n) = (spec.a, spec.b, spec.n);
    let len = b - a;
    let (mut d, grid, weighted) = match (spec.order, spec.bc) {
        (2, Dirichlet) => {
            let h = len / (n + 1) as f64;
            (second_order(n, h, false), Grid::new(a, b, h, 1..=n), false)
        }
        (2, Periodic) => {
            let h = len / n as f64;
            (second_order(n, h, true), Grid::new(a, b, h, 0..n), false)
        }
        (2, Neumann) => {
            let h = len / (n - 1) as f64;
            let mut d = second_order(n, h, false);
            // ghost v_{-1} = v_1, v_n = v_{n-2}
            d[(0, 1)] = 2.0 / (h * h);
            d[(n - 1, n - 2)] = 2.0 / (h * h);
            (d, Grid::new(a, b, h, 0..n), true)
        }
        (2, NonlocalSum) => {
            let h = len / (n - 1) as f64;
            let h2 = h * h;
            let mut d = second_order(n, h, false);
            // central differences at the ends:
            // v_{-1} = v_1 - 2h (v_0 + v_{n-1}),  v_n = v_{n-2} - 2h (v_0 + v_{n-1})
            d[(0, 0)] = -(2.0 + 2.0 * h) / h2;
            d[(0, 1)] = 2.0 / h2;
            d[(0, n - 1)] = -2.0 / h;
            d[(n - 1, n - 1)] = -(2.0 + 2.0 * h) / h2;
            d[(n - 1, n - 2)] = 2.0 / h2;
            d[(n - 1, 0)] = -2.0 / h;
            (d, Grid::new(a, b, h, 0..n), true)
        }
        (4, Periodic) => {
            let h = len / n as f64;
            (fourth_order(n, h, true), Grid::new(a, b, h, 0..n), false)
        }
        (4, Clamped) => {
            let h = len / (n + 1) as f64;
            let mut d = fourth_order(n, h, false);
            // v_0 = 0 and ghost v_{-1} = v_1 turn the corner 6 into 7
            let h4 = h.powi(4);
            d[(0, 0)] = -7.0 / h4;
            d[(n - 1, n - 1)] = -7.0 / h4;
            (d, Grid::new(a, b, h, 1..=n), false)
        }
        _ => unreachable!("validated above"),
    };
    if weighted {
        symmetrize_trapezoid(&mut d);
    }
    let sign = spec.effective_sign();
    let m = if spec.order == 4 { -sign * d } else { sign * d };
    Ok((Matrix::from_dmatrix(m)?, grid))
}

/// Stencil (1, -2, 1)/h², optionally with wraparound.
fn second_order(n: usize, h: f64, periodic: bool) -> DMatrix<f64> {
    let c = 1.0 / (h * h);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] += -2.0 * c;
        for off in [-1isize, 1] {
            let j = i as isize + off;
            if periodic {
                d[(i, j.rem_euclid(n as isize) as usize)] += c;
            } else if (0..n as isize).contains(&j) {
                d[(i, j as usize)] += c;
            }
        }
    }
    d
}

/// Stencil (1, -4, 6, -4, 1)/h⁴ (positive semidefinite, i.e. `+v''''`).
fn fourth_order(n: usize, h: f64, periodic: bool) -> DMatrix<f64> {
    let c = 1.0 / h.powi(4);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for (off, w) in [(-2isize, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)] {
            let j = i as isize + off;
            if periodic {
                d[(i, j.rem_euclid(n as isize) as usize)] += w * c;
            } else if (0..n as isize).contains(&j) {
                d[(i, j as usize)] += w * c;
            }
        }
    }
    // `fourth_order` returns the stencil of +v''''; callers negate via sign.
    -d
}

/// `W^{1/2} D W^{-1/2}` with trapezoid weights (1/2 at both ends), averaged
/// with its transpose to make the symmetry exact in floating point.
fn symmetrize_trapezoid(d: &mut DMatrix<f64>) {
    let n = d.nrows();
    let sqrt_w = |i: usize| if i == 0 || i == n - 1 { 1.0 / SQRT_2 } else { 1.0 };
    let s = DMatrix::from_fn(n, n, |j, k| sqrt_w(j) * d[(j, k)] / sqrt_w(k));
    *d = (&s + s.transpose()) * 0.5;
}

/// Eigenvalue of maximal real part and a real eigenvector for it, signed so
/// that its largest-magnitude entry is positive.
pub fn leading_eigenpair(a: &Matrix) -> Result<(f64, Vector)> {
    let spec = eig(a, DEFAULT_TOL_SEP)?;
    let lead = spec.leading();
    let v = spec
        .leading_right_real()
        .ok_or(Error::NonPerron { re: lead.re, im: lead.im })?;
    Ok((lead.re, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use BoundaryCondition::*;

    #[test]
    fn periodic_second_order_rows_sum_to_zero() {
        let (m, g) = build_operator(&OperatorSpec::new(2, Periodic, 8)).unwrap();
        assert_eq!(g.len(), 8);
        for s in m.row_sums() {
            assert!(s.abs() < 1e-9);
        }
        let (lambda, v) = leading_eigenpair(&m).unwrap();
        assert!(lambda.abs() < 1e-9);
        let c = v.get(0);
        assert!(c > 0.0 && v.iter().all(|x| (x - c).abs() < 1e-12));
    }

    #[test]
    fn rejects_invalid_specs() {
        for spec in [
            OperatorSpec::new(4, Dirichlet, 10),
            OperatorSpec::new(2, Clamped, 10),
            OperatorSpec::new(3, Periodic, 10),
            OperatorSpec::new(2, Dirichlet, 3),
            OperatorSpec::new(2, Dirichlet, 10).on_interval(1.0, 0.0),
        ] {
            assert!(matches!(build_operator(&spec), Err(Error::Spec(_))), "{spec:?}");
        }
        let mut s = OperatorSpec::new(2, Neumann, 10);
        s.sign = Some(2);
        assert!(build_operator(&s).is_err());
    }

    #[test]
    fn grids_include_or_exclude_endpoints() {
        let (_, g) = build_operator(&OperatorSpec::new(2, Dirichlet, 9)).unwrap();
        assert!((g.h - 0.1).abs() < 1e-15);
        assert!((g.points[0] - 0.1).abs() < 1e-15);
        let (_, g) = build_operator(&OperatorSpec::new(2, Neumann, 11)).unwrap();
        assert_eq!(g.points[0], 0.0);
        assert!((g.points[10] - 1.0).abs() < 1e-15);
        assert_eq!(g.boundary_distance[0], 0.0);
        let (_, g) = build_operator(&OperatorSpec::new(4, Clamped, 9)).unwrap();
        let d2 = g.distance_squared().unwrap();
        assert!((d2.get(0) - 0.01).abs() < 1e-15 && d2.min_entry() > 0.0);
    }

    #[test]
    fn sign_flips_principal_part() {
        let mut s = OperatorSpec::new(2, Dirichlet, 5);
        let (m, _) = build_operator(&s).unwrap();
        s.sign = Some(-1);
        let (neg, _) = build_operator(&s).unwrap();
        assert_eq!(neg, m.scale(-1.0));
    }

    #[test]
    fn json_shape() {
        let s: OperatorSpec = serde_json::from_str(r#"{"order":2,"bc":"Neumann","n":200}"#).unwrap();
        assert_eq!(s, OperatorSpec::new(2, Neumann, 200));
        let t: OperatorSpec = serde_json::from_str(r#"{"order":4,"bc":"clamped","a":-1,"b":1,"n":50}"#).unwrap();
        assert_eq!(t.bc, Clamped);
        assert_eq!(t.a, -1.0);
    }

    #[test]
    fn nonlocal_is_symmetric_with_negative_corners() {
        let (m, _) = build_operator(&OperatorSpec::new(2, NonlocalSum, 20)).unwrap();
        assert_eq!(m.symmetry_defect(), 0.0);
        assert!(m.get(0, 19) < 0.0);
    }
}
