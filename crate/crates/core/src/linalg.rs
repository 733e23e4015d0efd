//! Small dense linear algebra: symmetric matrices, Cholesky and least squares.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factorizes `a`; fails with [`Error::IllConditioned`] when a pivot is not
    /// safely positive.
    pub fn factor(a: &SymMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![T::zero(); n * n];
        let scale = (0..n).map(|i| a.get(i, i).abs()).fold(T::zero(), T::max);
        let tiny = T::epsilon() * T::from_usize_lossy(n.max(1)) * scale;
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > tiny) || !d.is_finite() {
                return Err(Error::IllConditioned { condition: condition_bound(a, &l, j) });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Cheap condition estimate `(max L_ii / min L_ii)²`.
    pub fn condition_estimate(&self) -> T {
        let diag: Vec<T> = (0..self.n).map(|i| self.l[i * self.n + i]).collect();
        let hi = diag.iter().copied().fold(T::zero(), T::max);
        let lo = diag.iter().copied().fold(T::infinity(), T::min);
        (hi / lo) * (hi / lo)
    }
}

fn condition_bound<T: Scalar>(a: &SymMatrix<T>, l: &[T], failed: usize) -> f64 {
    let n = a.dim();
    let hi = (0..n).map(|i| a.get(i, i).abs()).fold(T::zero(), T::max);
    let lo = (0..failed).map(|i| l[i * n + i] * l[i * n + i]).fold(T::infinity(), T::min);
    if failed == 0 || !(lo > T::zero()) {
        f64::INFINITY
    } else {
        (hi / lo).as_f64().max(1.0 / f64::EPSILON)
    }
}

/// Least-squares solution of the overdetermined `rows × cols` system by
/// Householder QR. `a` is row-major.
pub fn least_squares<T: Scalar>(a: &[T], rows: usize, cols: usize, b: &[T]) -> Result<Vec<T>> {
    if a.len() != rows * cols || b.len() != rows {
        return Err(Error::input("least-squares dimensions do not agree"));
    }
    if rows < cols {
        return Err(Error::input(format!("need at least {cols} rows, got {rows}")));
    }
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    let two = T::lit(2.0);
    for k in 0..cols {
        let norm = (k..rows).map(|i| r[i * cols + k] * r[i * cols + k]).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        let alpha = if r[k * cols + k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| r[i * cols + k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..cols {
            let dot: T = (k..rows).map(|i| v[i - k] * r[i * cols + j]).sum();
            let f = two * dot / vnorm2;
            for i in k..rows {
                r[i * cols + j] = r[i * cols + j] - f * v[i - k];
            }
        }
        let dot: T = (k..rows).map(|i| v[i - k] * y[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..rows {
            y[i] = y[i] - f * v[i - k];
        }
    }
    let rmax = (0..cols).map(|k| r[k * cols + k].abs()).fold(T::zero(), T::max);
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let d = r[k * cols + k];
        if d.abs() <= T::epsilon() * rmax * T::from_usize_lossy(rows) {
            return Err(Error::IllConditioned { condition: (rmax / d.abs()).as_f64() });
        }
        let mut s = y[k];
        for j in (k + 1)..cols {
            s = s - r[k * cols + j] * x[j];
        }
        x[k] = s / d;
    }
    Ok(x)
}
