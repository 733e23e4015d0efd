//! Hierarchical refinement of an amplitude by signed Gaussian mixtures.
//!
//! Level `n` fits the residual `A_n = A_0 - Σ_{k<n} A_{p_k,k}` with atoms at
//! its positive maxima (positive weights), its negative minima (negative
//! weights) and, when the origin is itself such an extremum, a center atom.
//! For the mean-squares method each level satisfies the energy ledger
//! `‖A_{n+1}‖² = ‖A_n‖² - Q_{n,max}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrema::{find_extrema, ExtremumKind, ExtremumPoint};
use crate::gaussian::{mixture_on_grid, GaussianAtom, SignedMixture};
use crate::grid::GridFunction;
use crate::l2::{fit_l2, AscentRecord, L2Config};
use crate::pointwise::{fit_pointwise, init_params, PointwiseConfig};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pointwise,
    L2,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Pointwise => "pointwise",
            Method::L2 => "l2",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointwise" => Ok(Method::Pointwise),
            "l2" => Ok(Method::L2),
            other => Err(Error::input(format!("unknown method {other:?}; expected pointwise or l2"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyConfig<T> {
    pub method: Method,
    pub max_levels: usize,
    /// Stopping threshold; `None` picks `1e-4‖A₀‖²` (L²) or `1e-3 max A₀`
    /// (pointwise).
    pub eps_stop: Option<T>,
    /// Extrema closer than this fraction of `max|A_n|` are merged away.
    pub prominence: T,
    pub pointwise: PointwiseConfig<T>,
    pub l2: L2Config<T>,
}

impl<T: Scalar> HierarchyConfig<T> {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            max_levels: 8,
            eps_stop: None,
            prominence: lit(1e-3),
            pointwise: PointwiseConfig::default(),
            l2: L2Config::default(),
        }
    }

    pub fn default_eps_stop(&self, original: &GridFunction<T>) -> T {
        match self.method {
            Method::L2 => lit::<T>(1e-4) * original.sq_norm(),
            Method::Pointwise => lit::<T>(1e-3) * original.max(),
        }
    }
}

/// `A_0 - Σ_k A_{p_k,k}` on the grid of `original`.
pub fn residual<T: Scalar>(original: &GridFunction<T>, levels: &[SignedMixture<T>]) -> GridFunction<T> {
    let mut values = original.values().to_vec();
    for mix in levels {
        let m = mixture_on_grid(mix, original.grid());
        for (v, a) in values.iter_mut().zip(m.values()) {
            *v = *v - *a;
        }
    }
    // Symmetrize against rounding so the residual stays exactly even.
    let n = values.len();
    let half = lit::<T>(0.5);
    for i in 0..n / 2 {
        let s = half * (values[i] + values[n - 1 - i]);
        values[i] = s;
        values[n - 1 - i] = s;
    }
    GridFunction::new(*original.grid(), values).expect("residual of a valid grid function is valid")
}

/// Extrema of a residual that receive atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTargets<T> {
    /// Center target first (if any), then interior targets by location.
    pub targets: Vec<ExtremumPoint<T>>,
    pub p_n: usize,
    pub q_n: usize,
    pub has_center: bool,
}

/// Positive maxima, negative minima and a qualifying origin of `residual`.
pub fn level_targets<T: Scalar>(residual: &GridFunction<T>, prominence: T) -> Result<LevelTargets<T>> {
    let scale = residual.max_abs();
    if !(scale > T::zero()) {
        return Ok(LevelTargets { targets: Vec::new(), p_n: 0, q_n: 0, has_center: false });
    }
    let floor = prominence * scale;
    let report = find_extrema(residual.half(), residual.grid().step(), floor)?;
    let qualifies = |p: &ExtremumPoint<T>| {
        p.is_non_degenerate()
            && p.value.abs() >= floor
            && match p.kind {
                ExtremumKind::Max => p.value > T::zero(),
                ExtremumKind::Min => p.value < T::zero(),
            }
    };
    let mut targets = Vec::new();
    let has_center = match report.origin_point() {
        Some(o) if qualifies(&o) => {
            targets.push(o);
            true
        }
        _ => false,
    };
    let interior: Vec<_> = report.points.into_iter().filter(|p| p.location > T::zero() && qualifies(p)).collect();
    let p_n = interior.iter().filter(|p| p.kind == ExtremumKind::Max).count();
    let q_n = interior.len() - p_n;
    targets.extend(interior);
    Ok(LevelTargets { targets, p_n, q_n, has_center })
}

/// Result of one refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFit<T> {
    pub mixture: SignedMixture<T>,
    /// Captured energy `fᵀG⁻¹f` (mean-squares method only).
    pub q_max: Option<T>,
    pub p_n: usize,
    pub q_n: usize,
    pub has_center: bool,
    pub converged: bool,
    /// Accepted ascent iterates (mean-squares method only).
    pub history: Vec<AscentRecord<T>>,
}

/// Starting shapes from the extremum data: `ω = Ω_j`, `σ = -A(Ω_j)/A''(Ω_j)`.
pub fn initial_shapes<T: Scalar>(targets: &[ExtremumPoint<T>]) -> Result<Vec<GaussianAtom<T>>> {
    let state = init_params(targets)?;
    Ok(state
        .params
        .iter()
        .zip(targets)
        .map(|(p, t)| {
            let sign = if t.kind == ExtremumKind::Max { T::one() } else { -T::one() };
            if t.location == T::zero() {
                GaussianAtom::center(sign * p.alpha, p.sigma)
            } else {
                GaussianAtom::pair(sign * p.alpha, p.omega, p.sigma)
            }
        })
        .collect())
}

/// Fits one level to `residual`. Returns `None` when there is nothing to fit.
pub fn refine_once<T: Scalar>(residual: &GridFunction<T>, config: &HierarchyConfig<T>) -> Result<Option<LevelFit<T>>> {
    let lt = level_targets(residual, config.prominence)?;
    if lt.targets.is_empty() {
        return Ok(None);
    }
    let (mixture, q_max, converged, history) = match config.method {
        Method::Pointwise => {
            let fit = fit_pointwise(residual, &lt.targets, &config.pointwise)?;
            (fit.mixture, None, fit.converged, Vec::new())
        }
        Method::L2 => {
            let init = initial_shapes(&lt.targets)?;
            let fit = fit_l2(residual, &init, &config.l2)?;
            (fit.mixture, Some(fit.state.q_value), fit.converged, fit.history)
        }
    };
    Ok(Some(LevelFit { mixture, q_max, p_n: lt.p_n, q_n: lt.q_n, has_center: lt.has_center, converged, history }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord<T> {
    pub mixture: SignedMixture<T>,
    pub q_max: Option<T>,
    /// `‖A_n‖²` of the residual this level was fitted to.
    pub input_sq_norm: T,
    /// `‖A_{n+1}‖²` after subtracting this level.
    pub residual_sq_norm: T,
    pub residual_max: T,
    pub residual_min: T,
    pub p_n: usize,
    pub q_n: usize,
    pub has_center: bool,
    pub converged: bool,
    pub atom_count: usize,
    pub history: Vec<AscentRecord<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BelowThreshold,
    NoExtrema,
    MaxLevels,
    FitFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementLedger<T> {
    pub method: Method,
    pub eps_stop: T,
    pub original_sq_norm: T,
    pub levels: Vec<LevelRecord<T>>,
    pub stop_reason: StopReason,
    /// Message of the error that ended the loop, if any.
    pub failure: Option<String>,
}

impl<T: Scalar> RefinementLedger<T> {
    pub fn mixtures(&self) -> Vec<SignedMixture<T>> {
        self.levels.iter().map(|l| l.mixture.clone()).collect()
    }

    /// Worst relative defect of `‖A_{n+1}‖² = ‖A_n‖² - Q_n` over the levels.
    pub fn ledger_defect(&self) -> Option<T> {
        self.levels
            .iter()
            .filter_map(|l| l.q_max.map(|q| ((l.input_sq_norm - q - l.residual_sq_norm) / l.input_sq_norm).abs()))
            .reduce(T::max)
    }
}

fn below<T: Scalar>(method: Method, r: &GridFunction<T>, eps: T) -> bool {
    match method {
        Method::L2 => r.sq_norm() <= eps,
        Method::Pointwise => r.max() <= eps && r.min() >= -eps,
    }
}

/// Refines level by level until the stopping criterion, an empty level, a
/// failed fit or `max_levels`.
pub fn refine_until<T: Scalar>(original: &GridFunction<T>, config: &HierarchyConfig<T>) -> Result<RefinementLedger<T>> {
    let eps_stop = config.eps_stop.unwrap_or_else(|| config.default_eps_stop(original));
    if !(eps_stop > T::zero()) {
        return Err(Error::domain("eps_stop must be positive"));
    }
    let mut ledger = RefinementLedger {
        method: config.method,
        eps_stop,
        original_sq_norm: original.sq_norm(),
        levels: Vec::new(),
        stop_reason: StopReason::MaxLevels,
        failure: None,
    };
    let mut current = original.clone();
    let mut mixtures = Vec::new();
    loop {
        if below(config.method, &current, eps_stop) {
            ledger.stop_reason = StopReason::BelowThreshold;
            break;
        }
        if ledger.levels.len() >= config.max_levels {
            ledger.stop_reason = StopReason::MaxLevels;
            break;
        }
        let fit = match refine_once(&current, config) {
            Ok(Some(fit)) => fit,
            Ok(None) => {
                ledger.stop_reason = StopReason::NoExtrema;
                break;
            }
            Err(e) => {
                ledger.stop_reason = StopReason::FitFailed;
                ledger.failure = Some(e.to_string());
                break;
            }
        };
        mixtures.push(fit.mixture.clone());
        let next = residual(original, &mixtures);
        ledger.levels.push(LevelRecord {
            atom_count: fit.mixture.atom_count(),
            mixture: fit.mixture,
            q_max: fit.q_max,
            input_sq_norm: current.sq_norm(),
            residual_sq_norm: next.sq_norm(),
            residual_max: next.max(),
            residual_min: next.min(),
            p_n: fit.p_n,
            q_n: fit.q_n,
            has_center: fit.has_center,
            converged: fit.converged,
            history: fit.history,
        });
        current = next;
    }
    Ok(ledger)
}
