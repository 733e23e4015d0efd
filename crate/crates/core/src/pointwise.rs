//! Pointwise parameter selection.
//!
//! Each target extremum `Ω_j` gets one atom whose weight, center and width are
//! chosen so that the mixture reproduces `A(Ω_j)`, `A'(Ω_j) = 0` and
//! `A''(Ω_j)`. The nonlinear system is solved by a Gauss–Seidel style fixed
//! point iteration that inverts the dominant Gaussian term of each atom and
//! keeps the other terms at their latest values.
//!
//! Targets of kind `Min` are fitted with negative weight (the residual is
//! negated locally); a target at `location == 0` becomes a center atom.

use crate::error::{Error, Result};
use crate::extrema::{ExtremumKind, ExtremumPoint};
use crate::gaussian::{eval_pair, GaussianAtom, Order, SignedMixture, SIGMA_MIN};
use crate::grid::GridFunction;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseConfig<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Consecutive guard failures after which an atom is dropped.
    pub max_guard_failures: usize,
}

impl<T: Scalar> Default for PointwiseConfig<T> {
    fn default() -> Self {
        Self { tol: lit(1e-9), max_iter: 200, max_guard_failures: 10 }
    }
}

/// Parameters of one atom during the iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams<T> {
    pub alpha: T,
    pub omega: T,
    pub sigma: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseState<T> {
    pub params: Vec<PointParams<T>>,
    pub iteration: usize,
    /// Maximum relative parameter change of the last sweep.
    pub last_change: T,
    /// False once an atom has been dropped after repeated guard failures.
    pub active: Vec<bool>,
    pub guard_streak: Vec<usize>,
}

/// Per-index outcome of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub skipped: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Role<T> {
    sign: T,
    center: bool,
}

fn role<T: Scalar>(t: &ExtremumPoint<T>) -> Role<T> {
    Role {
        sign: match t.kind {
            ExtremumKind::Max => T::one(),
            ExtremumKind::Min => -T::one(),
        },
        center: t.location == T::zero(),
    }
}

fn atom_of<T: Scalar>(p: &PointParams<T>, r: Role<T>) -> GaussianAtom<T> {
    if r.center {
        GaussianAtom::center(p.alpha, p.sigma)
    } else {
        GaussianAtom::pair(p.alpha, p.omega, p.sigma)
    }
}

/// Starting values `α = |A(Ω_j)|`, `ω = Ω_j`, `σ = -A(Ω_j)/A''(Ω_j)`.
pub fn init_params<T: Scalar>(targets: &[ExtremumPoint<T>]) -> Result<PointwiseState<T>> {
    let mut params = Vec::with_capacity(targets.len());
    for (index, t) in targets.iter().enumerate() {
        let r = role(t);
        let v = r.sign * t.value;
        let c = r.sign * t.second_deriv;
        if !(v > T::zero()) {
            return Err(Error::RejectedTarget { index, reason: format!("value {} has the wrong sign", t.value) });
        }
        if !(c < T::zero()) {
            return Err(Error::RejectedTarget {
                index,
                reason: format!("second derivative {} is degenerate for a {}", t.second_deriv, t.kind.as_str()),
            });
        }
        if t.location < T::zero() {
            return Err(Error::RejectedTarget { index, reason: "negative location".into() });
        }
        params.push(PointParams { alpha: v, omega: t.location, sigma: -v / c });
    }
    Ok(PointwiseState {
        active: vec![true; params.len()],
        guard_streak: vec![0; params.len()],
        params,
        iteration: 0,
        last_change: T::infinity(),
    })
}

/// Sum over active atoms other than `skip` of `sign·α·g^{(order)}(ω)`.
fn others<T: Scalar>(state: &PointwiseState<T>, roles: &[Role<T>], skip: usize, omega: T, order: Order) -> T {
    state
        .params
        .iter()
        .zip(roles)
        .enumerate()
        .filter(|&(k, _)| k != skip && state.active[k])
        .map(|(_, (p, &r))| r.sign * p.alpha * eval_pair(omega, &atom_of(p, r), order))
        .sum()
}

/// One Gauss–Seidel sweep over all targets.
///
/// When the guard `𝒜 > 0, 𝒞 < 0` fails for an index its previous triple is
/// kept and the index is flagged in the report.
pub fn sweep<T: Scalar>(
    state: &PointwiseState<T>,
    targets: &[ExtremumPoint<T>],
) -> Result<(PointwiseState<T>, SweepReport)> {
    if targets.len() != state.params.len() {
        return Err(Error::input("target count does not match the state"));
    }
    let roles: Vec<Role<T>> = targets.iter().map(role).collect();
    let mut next = state.clone();
    let mut skipped = vec![false; targets.len()];
    let two = lit::<T>(2.0);
    let mut change = T::zero();
    for (j, t) in targets.iter().enumerate() {
        if !next.active[j] {
            continue;
        }
        let r = roles[j];
        let old = next.params[j];
        let om = t.location;
        let rest0 = others(&next, &roles, j, om, Order::Value);
        let rest2 = others(&next, &roles, j, om, Order::Second);
        let updated = if r.center {
            let a = r.sign * (t.value - rest0);
            let c = r.sign * (t.second_deriv - rest2);
            (a > T::zero() && c < T::zero()).then(|| PointParams { alpha: a, omega: T::zero(), sigma: -a / c })
        } else {
            let rest1 = others(&next, &roles, j, om, Order::First);
            let plus = om + old.omega;
            let mirror = (-plus * plus / (two * old.sigma)).exp();
            let a = r.sign * (t.value - rest0) - old.alpha * mirror;
            let b = r.sign * rest1 - old.alpha * plus / old.sigma * mirror;
            let c = r.sign * (t.second_deriv - rest2)
                + old.alpha * (T::one() / old.sigma - plus * plus / (old.sigma * old.sigma)) * mirror;
            if a > T::zero() && c < T::zero() {
                let d = b / a;
                let sigma = a / (a * d * d - c);
                let omega = om - sigma * d;
                let alpha = a * (sigma * d * d / two).exp();
                Some(PointParams { alpha, omega, sigma })
            } else {
                None
            }
        };
        match updated {
            Some(mut p) if p.sigma.is_finite() && p.alpha.is_finite() && p.omega.is_finite() => {
                p.sigma = p.sigma.max(lit(SIGMA_MIN));
                change = change.max(relative_change(&old, &p));
                next.params[j] = p;
                next.guard_streak[j] = 0;
            }
            _ => {
                skipped[j] = true;
                next.guard_streak[j] += 1;
            }
        }
    }
    next.iteration += 1;
    next.last_change = change;
    Ok((next, SweepReport { skipped }))
}

fn relative_change<T: Scalar>(old: &PointParams<T>, new: &PointParams<T>) -> T {
    let da = ((new.alpha - old.alpha) / old.alpha).abs();
    let dw = (new.omega - old.omega).abs() / old.sigma.sqrt();
    let ds = ((new.sigma - old.sigma) / old.sigma).abs();
    da.max(dw).max(ds)
}

/// One row of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseRecord<T> {
    pub iteration: usize,
    pub index: usize,
    pub alpha: T,
    pub omega: T,
    pub sigma: T,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseFit<T> {
    pub mixture: SignedMixture<T>,
    pub state: PointwiseState<T>,
    pub converged: bool,
    pub iterations: usize,
    /// Indices of targets whose atoms were dropped.
    pub dropped: Vec<usize>,
    pub history: Vec<PointwiseRecord<T>>,
    /// `∫ (A - A_p)²` on the amplitude grid.
    pub residual_sq_norm: T,
}

/// Iterates [`sweep`] until the relative change drops below `tol`.
///
/// Non-convergence is reported through `converged = false`.
pub fn fit_pointwise<T: Scalar>(
    amplitude: &GridFunction<T>,
    targets: &[ExtremumPoint<T>],
    config: &PointwiseConfig<T>,
) -> Result<PointwiseFit<T>> {
    if !(config.tol > T::zero()) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut state = init_params(targets)?;
    let mut history = Vec::new();
    let record = |state: &PointwiseState<T>, skipped: &[bool], history: &mut Vec<PointwiseRecord<T>>| {
        for (index, p) in state.params.iter().enumerate() {
            history.push(PointwiseRecord {
                iteration: state.iteration,
                index,
                alpha: p.alpha,
                omega: p.omega,
                sigma: p.sigma,
                skipped: skipped[index],
            });
        }
    };
    record(&state, &vec![false; targets.len()], &mut history);
    let mut converged = false;
    let mut dropped = Vec::new();
    while state.iteration < config.max_iter {
        let (next, report) = sweep(&state, targets)?;
        state = next;
        record(&state, &report.skipped, &mut history);
        for j in 0..targets.len() {
            if state.active[j] && state.guard_streak[j] >= config.max_guard_failures {
                state.active[j] = false;
                dropped.push(j);
            }
        }
        if !report.skipped.iter().any(|&s| s) && state.last_change < config.tol {
            converged = true;
            break;
        }
    }
    let mixture = to_mixture(&state, targets)?;
    let model = crate::gaussian::mixture_on_grid(&mixture, amplitude.grid());
    let residual_sq_norm = amplitude.sub(model.values()).sq_norm();
    Ok(PointwiseFit { mixture, iterations: state.iteration, state, converged, dropped, history, residual_sq_norm })
}

/// Converts the active atoms of a state into a signed mixture.
pub fn to_mixture<T: Scalar>(state: &PointwiseState<T>, targets: &[ExtremumPoint<T>]) -> Result<SignedMixture<T>> {
    let atoms = state.params.iter().zip(targets).zip(&state.active).filter(|(_, &on)| on).map(|((p, t), _)| {
        let r = role(t);
        let mut a = atom_of(p, r);
        a.alpha = r.sign * a.alpha;
        a
    });
    SignedMixture::from_signed_atoms(atoms)
}

/// Largest violations of the three matching conditions at the targets:
/// `(|A_p - A|, |A_p'|, |A_p'' - A''|)`, each relative to its natural scale.
pub fn condition_defects<T: Scalar>(mix: &SignedMixture<T>, targets: &[ExtremumPoint<T>]) -> Vec<(T, T, T)> {
    targets
        .iter()
        .map(|t| {
            (
                (mix.eval(t.location, Order::Value) - t.value).abs(),
                mix.eval(t.location, Order::First).abs(),
                (mix.eval(t.location, Order::Second) - t.second_deriv).abs(),
            )
        })
        .collect()
}
