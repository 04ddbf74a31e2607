//! Eventual positivity of linear evolution equations.
//!
//! Matrix semigroups are analysed through their spectrum (dominant eigenvalue
//! and Perron eigenvectors), differential operators through finite-difference
//! or Fourier generators, and resolvent sign patterns through sweeps of
//! `(λ - A)⁻¹` near the leading eigenvalue.

pub mod discretize;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maxprinciple;
pub mod positivity;
pub mod semigroups;

pub use error::{Error, Result};
pub use linalg::{eig, estimate_growth_bound, mat_exp, resolvent, Matrix, Spectrum, Vector};
pub use nalgebra::Complex;
