//! Uniform frequency and time grids plus functions sampled on them.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Symmetric frequency lattice `omega_p = p * omega_max / n`, `p = -n..=n`.
///
/// Samples are stored with index `p + n`, so index `n` is the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid<T> {
    omega_max: T,
    half_len: usize,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(omega_max: T, half_len: usize) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > T::zero()) {
            return Err(Error::domain(format!("omega_max must be positive, got {omega_max}")));
        }
        if half_len < 2 {
            return Err(Error::domain(format!("n_freq must be at least 2, got {half_len}")));
        }
        Ok(Self { omega_max, half_len })
    }

    #[inline]
    pub fn omega_max(&self) -> T {
        self.omega_max
    }

    /// The half count `N`; the grid holds `2N + 1` points.
    #[inline]
    pub fn half_len(&self) -> usize {
        self.half_len
    }

    #[inline]
    pub fn len(&self) -> usize {
        2 * self.half_len + 1
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn step(&self) -> T {
        self.omega_max / T::from_usize_lossy(self.half_len)
    }

    #[inline]
    pub fn origin_index(&self) -> usize {
        self.half_len
    }

    /// Frequency at storage index `idx` (`0..len`).
    #[inline]
    pub fn omega(&self, idx: usize) -> T {
        let p = idx as i64 - self.half_len as i64;
        T::from_i64(p).unwrap() * self.step()
    }

    pub fn omegas(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.omega(i)).collect()
    }

    /// Storage index of the mirror point `-omega`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    /// Composite trapezoid weight at storage index `idx` (half weight at `±omega_max`).
    #[inline]
    pub fn weight(&self, idx: usize) -> T {
        if idx == 0 || idx + 1 == self.len() {
            self.step() * lit(0.5)
        } else {
            self.step()
        }
    }

    /// Trapezoid integral over `[-omega_max, omega_max]` of sampled values.
    pub fn integrate(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.len());
        values.iter().enumerate().map(|(i, &v)| self.weight(i) * v).sum()
    }
}

/// A real function sampled on a [`FrequencyGrid`] (amplitudes, residuals).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    grid: FrequencyGrid<T>,
    values: Vec<T>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: FrequencyGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::input(format!(
                "expected {} samples on the frequency grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite sample on the frequency grid"));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: FrequencyGrid<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.omegas().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: FrequencyGrid<T>) -> Self {
        Self { grid, values: vec![T::zero(); grid.len()] }
    }

    #[inline]
    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Samples on `[0, omega_max]`, origin first.
    #[inline]
    pub fn half(&self) -> &[T] {
        &self.values[self.grid.origin_index()..]
    }

    /// Trapezoid approximation of `∫ v²`.
    pub fn sq_norm(&self) -> T {
        let sq: Vec<T> = self.values.iter().map(|&v| v * v).collect();
        self.grid.integrate(&sq)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest `|v(omega) - v(-omega)|` over the grid.
    pub fn evenness_defect(&self) -> T {
        (0..self.grid.len()).map(|i| (self.values[i] - self.values[self.grid.mirror(i)]).abs()).fold(T::zero(), T::max)
    }

    pub fn sub(&self, other: &[T]) -> Self {
        debug_assert_eq!(other.len(), self.values.len());
        let values = self.values.iter().zip(other).map(|(&a, &b)| a - b).collect();
        Self { grid: self.grid, values }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| v * c).collect() }
    }
}

/// Uniform time grid `t_n = t_start + n * dt`, `n = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub t_start: T,
    pub dt: T,
    pub len: usize,
}

impl<T: Scalar> TimeGrid<T> {
    pub fn new(t_start: T, dt: T, len: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(Error::domain(format!("time step must be positive, got {dt}")));
        }
        if !t_start.is_finite() {
            return Err(Error::input("non-finite start time"));
        }
        if len == 0 {
            return Err(Error::input("time grid must contain at least one point"));
        }
        Ok(Self { t_start, dt, len })
    }

    /// Shannon lattice `t_n = n * pi / omega_max`, `n = -N..N-1`.
    pub fn lattice(grid: &FrequencyGrid<T>) -> Self {
        let dt = T::PI() / grid.omega_max();
        Self { t_start: -T::from_usize_lossy(grid.half_len()) * dt, dt, len: 2 * grid.half_len() }
    }

    #[inline]
    pub fn time(&self, n: usize) -> T {
        self.t_start + T::from_usize_lossy(n) * self.dt
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len).map(|n| self.time(n)).collect()
    }
}
