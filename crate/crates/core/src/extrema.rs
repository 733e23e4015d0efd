//! Local extrema of even functions sampled on `[0, Ω]`.
//!
//! Inputs are the nonnegative half of a symmetric grid, origin first. Even
//! symmetry is used to extend stencils across the origin.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Default prominence threshold relative to `max |values|`.
pub const DEFAULT_PROMINENCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
        }
    }

    fn opposite(self) -> Self {
        match self {
            ExtremumKind::Max => ExtremumKind::Min,
            ExtremumKind::Min => ExtremumKind::Max,
        }
    }
}

/// Classification of the origin, which is always a critical point of an even function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginKind {
    Max,
    Min,
    /// The input is constant.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumPoint<T> {
    pub location: T,
    pub value: T,
    pub second_deriv: T,
    pub kind: ExtremumKind,
}

impl<T: Scalar> ExtremumPoint<T> {
    pub fn is_non_degenerate(&self) -> bool {
        match self.kind {
            ExtremumKind::Max => self.second_deriv < T::zero(),
            ExtremumKind::Min => self.second_deriv > T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport<T> {
    /// Interior extrema ordered by location.
    pub points: Vec<ExtremumPoint<T>>,
    pub origin: OriginKind,
    pub origin_value: T,
    pub origin_second_deriv: T,
    /// Candidates dropped because their second derivative had the wrong sign.
    pub rejected: Vec<ExtremumPoint<T>>,
}

impl<T: Scalar> ExtremaReport<T> {
    /// The origin as an extremum point, when it is classified.
    pub fn origin_point(&self) -> Option<ExtremumPoint<T>> {
        let kind = match self.origin {
            OriginKind::Max => ExtremumKind::Max,
            OriginKind::Min => ExtremumKind::Min,
            OriginKind::Degenerate => return None,
        };
        Some(ExtremumPoint {
            location: T::zero(),
            value: self.origin_value,
            second_deriv: self.origin_second_deriv,
            kind,
        })
    }
}

/// Even extension reading `values[|i|]`.
#[inline]
fn even_at<T: Scalar>(values: &[T], i: i64) -> T {
    values[i.unsigned_abs() as usize]
}

fn stencil5<T: Scalar>(values: &[T], i: i64, step: T) -> T {
    let v = |k: i64| even_at(values, k);
    (-v(i - 2) + lit::<T>(16.0) * v(i - 1) - lit::<T>(30.0) * v(i) + lit::<T>(16.0) * v(i + 1) - v(i + 2))
        / (lit::<T>(12.0) * step * step)
}

fn stencil3<T: Scalar>(values: &[T], i: i64, step: T) -> T {
    let v = |k: i64| even_at(values, k);
    (v(i - 1) - lit::<T>(2.0) * v(i) + v(i + 1)) / (step * step)
}

/// Five-point central second derivative at `location` (in the units of
/// `step`), linearly interpolated between neighbouring grid points.
///
/// Requires two samples on each side of the interpolation nodes.
pub fn second_derivative<T: Scalar>(values: &[T], step: T, location: T) -> Result<T> {
    if !(step > T::zero()) {
        return Err(Error::domain("grid step must be positive"));
    }
    let x = location / step;
    if !x.is_finite() || x < T::zero() {
        return Err(Error::input("location outside the sampled range"));
    }
    let lo = x.floor().to_usize().unwrap_or(usize::MAX);
    let frac = x - T::from_usize_lossy(lo);
    let hi = if frac > T::zero() { lo + 1 } else { lo };
    if lo < 2 || hi + 2 >= values.len() {
        return Err(Error::input(format!("location {location} is within two samples of the boundary")));
    }
    let d_lo = stencil5(values, lo as i64, step);
    if hi == lo {
        return Ok(d_lo);
    }
    let d_hi = stencil5(values, hi as i64, step);
    Ok(d_lo + (d_hi - d_lo) * frac)
}

/// Second derivative using the even extension across the origin; falls back
/// to the three-point stencil next to the far boundary.
fn even_second_derivative<T: Scalar>(values: &[T], step: T, location: T) -> T {
    let x = location / step;
    let lo = x.floor().to_usize().unwrap_or(0);
    let frac = x - T::from_usize_lossy(lo);
    let n = values.len();
    let at = |i: usize| -> T {
        if i + 2 < n {
            stencil5(values, i as i64, step)
        } else if i + 1 < n {
            stencil3(values, i as i64, step)
        } else {
            stencil3(values, (n - 2) as i64, step)
        }
    };
    let d_lo = at(lo);
    if frac > T::zero() {
        d_lo + (at(lo + 1) - d_lo) * frac
    } else {
        d_lo
    }
}

struct Candidate<T> {
    location: T,
    value: T,
    kind: ExtremumKind,
}

/// Finds interior extrema of the even function whose samples on `[0, Ω]` are
/// `values` (uniform spacing `step`).
///
/// Extrema are located where the discrete slope changes sign and refined with
/// a parabola through three samples; flat runs report their midpoint. Pairs
/// of neighbouring extrema whose value difference is below `min_prominence`
/// are discarded together (a single extremum next to one of the ends is
/// discarded alone).
pub fn find_extrema<T: Scalar>(values: &[T], step: T, min_prominence: T) -> Result<ExtremaReport<T>> {
    if values.len() < 5 {
        return Err(Error::input(format!("need at least 5 samples, got {}", values.len())));
    }
    if !(step > T::zero()) {
        return Err(Error::domain("grid step must be positive"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite sample"));
    }
    let n = values.len();
    let origin_value = values[0];
    let origin_second_deriv = stencil5(values, 0, step);

    // Slope sign changes, with flat runs collapsed to their midpoint.
    let mut cands: Vec<Candidate<T>> = Vec::new();
    let mut first_sign: Option<bool> = None;
    let mut prev: Option<(bool, usize)> = None; // (rising, diff index)
    for i in 0..n - 1 {
        let d = values[i + 1] - values[i];
        if d == T::zero() {
            continue;
        }
        let rising = d > T::zero();
        if first_sign.is_none() {
            first_sign = Some(rising);
        }
        if let Some((was_rising, k)) = prev {
            if was_rising != rising {
                let kind = if was_rising { ExtremumKind::Max } else { ExtremumKind::Min };
                let (lo, hi) = (k + 1, i);
                let (location, value) = if lo == hi {
                    refine_parabola(values, lo, step)
                } else {
                    let mid = T::from_usize_lossy(lo + hi) * lit(0.5);
                    (mid * step, values[lo])
                };
                cands.push(Candidate { location, value, kind });
            }
        }
        prev = Some((rising, i));
    }

    let Some(first_rising) = first_sign else {
        return Ok(ExtremaReport {
            points: Vec::new(),
            origin: OriginKind::Degenerate,
            origin_value,
            origin_second_deriv,
            rejected: Vec::new(),
        });
    };
    let mut origin = if first_rising { ExtremumKind::Min } else { ExtremumKind::Max };

    if min_prominence > T::zero() {
        let end_value = values[n - 1];
        loop {
            let m = cands.len();
            if m == 0 {
                break;
            }
            // Node sequence: origin, candidates, end.
            let val = |k: usize| -> T {
                if k == 0 {
                    origin_value
                } else if k == m + 1 {
                    end_value
                } else {
                    cands[k - 1].value
                }
            };
            let mut best: Option<(usize, T)> = None;
            for k in 0..=m {
                let gap = (val(k + 1) - val(k)).abs();
                if gap < min_prominence && best.is_none_or(|(_, g)| gap < g) {
                    best = Some((k, gap));
                }
            }
            let Some((k, _)) = best else { break };
            if k == 0 {
                cands.remove(0);
            } else if k == m {
                cands.remove(m - 1);
            } else {
                cands.drain(k - 1..=k);
            }
            origin = match cands.first() {
                Some(c) => c.kind.opposite(),
                None if end_value > origin_value => ExtremumKind::Min,
                None if end_value < origin_value => ExtremumKind::Max,
                None => origin,
            };
        }
    }

    let mut points = Vec::with_capacity(cands.len());
    let mut rejected = Vec::new();
    for c in cands {
        let p = ExtremumPoint {
            location: c.location,
            value: c.value,
            second_deriv: even_second_derivative(values, step, c.location),
            kind: c.kind,
        };
        if p.is_non_degenerate() {
            points.push(p);
        } else {
            rejected.push(p);
        }
    }
    Ok(ExtremaReport {
        points,
        origin: match origin {
            ExtremumKind::Max => OriginKind::Max,
            ExtremumKind::Min => OriginKind::Min,
        },
        origin_value,
        origin_second_deriv,
        rejected,
    })
}

fn refine_parabola<T: Scalar>(values: &[T], i: usize, step: T) -> (T, T) {
    let (a, b, c) = (even_at(values, i as i64 - 1), values[i], values[i + 1]);
    let denom = a - lit::<T>(2.0) * b + c;
    if denom == T::zero() {
        return (T::from_usize_lossy(i) * step, b);
    }
    let half = lit::<T>(0.5);
    let delta = (half * (a - c) / denom).max(-half).min(half);
    ((T::from_usize_lossy(i) + delta) * step, b - lit::<T>(0.25) * (a - c) * delta)
}
