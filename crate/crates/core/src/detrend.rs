//! Global least-squares polynomial detrending.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::Scalar;

pub const MAX_DEGREE: usize = 10;

/// Polynomial in the scaled variable `u = (t - center) / half_width`, which
/// maps the sample range onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub center: f64,
    pub half_width: f64,
    /// Coefficients of `u⁰, u¹, …`.
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval<T: Scalar>(&self, t: T) -> T {
        let u = (t.as_f64() - self.center) / self.half_width;
        T::lit(self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * u + c))
    }
}

pub fn fit_polynomial<T: Scalar>(t: &[T], y: &[T], degree: usize) -> Result<Polynomial> {
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::input(format!("degree must be in 1..={MAX_DEGREE}, got {degree}")));
    }
    if t.len() != y.len() {
        return Err(Error::input("time and value columns differ in length"));
    }
    if t.len() < degree + 1 {
        return Err(Error::input(format!("degree {degree} needs at least {} samples, got {}", degree + 1, t.len())));
    }
    let lo = t.iter().map(|v| v.as_f64()).fold(f64::INFINITY, f64::min);
    let hi = t.iter().map(|v| v.as_f64()).fold(f64::NEG_INFINITY, f64::max);
    let center = 0.5 * (lo + hi);
    let half_width = if hi > lo { 0.5 * (hi - lo) } else { 1.0 };
    let cols = degree + 1;
    let mut a = Vec::with_capacity(t.len() * cols);
    for &ti in t {
        let u = (ti.as_f64() - center) / half_width;
        let mut p = 1.0;
        for _ in 0..cols {
            a.push(p);
            p *= u;
        }
    }
    let b: Vec<f64> = y.iter().map(|v| v.as_f64()).collect();
    let coefficients = least_squares(&a, t.len(), cols, &b)?;
    Ok(Polynomial { center, half_width, coefficients })
}

/// Residual `y - p(t)` of the global fit, together with the polynomial.
pub fn detrend<T: Scalar>(t: &[T], y: &[T], degree: usize) -> Result<(Vec<T>, Polynomial)> {
    let poly = fit_polynomial(t, y, degree)?;
    let r = t.iter().zip(y).map(|(&ti, &yi)| yi - poly.eval(ti)).collect();
    Ok((r, poly))
}
