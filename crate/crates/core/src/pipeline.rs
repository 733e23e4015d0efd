//! End-to-end flows used by the command-line front end: signal → spectrum →
//! hierarchical amplitude fit → chirplet models → reconstruction.

use num_complex::Complex;

use crate::chirplet::{
    build_model_with, levels_spectrum, phase_valid_at, synthesize_levels, ChirpletModel, PhasePolicy,
};
use crate::error::{Error, Result};
use crate::gaussian::mixture_on_grid;
use crate::hierarchy::{refine_until, HierarchyConfig, Method, RefinementLedger};
use crate::spectrum::{compute_spectrum, roundtrip_error, RealSignal, SampledSpectrum, DEFAULT_PHASE_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeConfig {
    pub omega_max: f64,
    pub n_freq: usize,
    pub method: Method,
    pub eps_stop: Option<f64>,
    pub max_levels: usize,
    pub prominence: f64,
    /// Relative amplitude below which the phase is flagged invalid.
    pub phase_floor: f64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        Self {
            omega_max: 4.0,
            n_freq: 1024,
            method: Method::L2,
            eps_stop: None,
            max_levels: 8,
            prominence: 1e-3,
            phase_floor: DEFAULT_PHASE_FLOOR,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub spectrum: SampledSpectrum<f64>,
    pub ledger: RefinementLedger<f64>,
    /// One model per refinement level.
    pub models: Vec<ChirpletModel<f64>>,
    /// Atoms whose phase stencil touched samples below the phase floor.
    pub phase_invalid_atoms: usize,
    /// Sum of the level mixtures on the spectrum grid.
    pub amplitude_model: Vec<f64>,
    pub model_spectrum: Vec<Complex<f64>>,
    pub reconstruction: RealSignal<f64>,
    pub roundtrip_error: f64,
    pub time_error: f64,
    pub amplitude_error: f64,
}

/// `‖a - b‖ / ‖a‖` on equally weighted samples.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

pub fn spectrum_of(
    signal: &RealSignal<f64>,
    omega_max: f64,
    n_freq: usize,
    phase_floor: f64,
) -> Result<SampledSpectrum<f64>> {
    let raw = compute_spectrum(signal, omega_max, n_freq)?;
    if phase_floor == DEFAULT_PHASE_FLOOR {
        return Ok(raw);
    }
    SampledSpectrum::with_phase_floor(*raw.grid(), raw.h_even().to_vec(), raw.h_odd().to_vec(), phase_floor)
}

pub fn decompose(signal: &RealSignal<f64>, config: &DecomposeConfig) -> Result<Decomposition> {
    let spectrum = spectrum_of(signal, config.omega_max, config.n_freq, config.phase_floor)?;
    let amplitude = spectrum.amplitude_fn();
    if !(amplitude.max() > 0.0) {
        return Err(Error::degenerate("the signal has a zero spectrum on the band"));
    }
    let phase = spectrum.phase_samples()?;
    let mut hc = HierarchyConfig::new(config.method);
    hc.max_levels = config.max_levels;
    hc.eps_stop = config.eps_stop;
    hc.prominence = config.prominence;
    let ledger = refine_until(&amplitude, &hc)?;
    let mut models = Vec::with_capacity(ledger.levels.len());
    let mut phase_invalid_atoms = 0;
    for level in &ledger.levels {
        let mix = &level.mixture;
        phase_invalid_atoms += mix.signed_atoms().iter().filter(|a| !phase_valid_at(&phase, a.omega_c)).count();
        models.push(build_model_with(mix, &phase, PhasePolicy::Hold)?);
    }
    let grid = spectrum.grid();
    let mut amplitude_model = vec![0.0; grid.len()];
    for level in &ledger.levels {
        for (acc, v) in amplitude_model.iter_mut().zip(mixture_on_grid(&level.mixture, grid).values()) {
            *acc += v;
        }
    }
    let model_spectrum = levels_spectrum(&models, &grid.omegas());
    let reconstruction = synthesize_levels(&models, &signal.time_grid())?;
    let roundtrip_error = roundtrip_error(&spectrum, &model_spectrum)?;
    let time_error = relative_l2(signal.samples(), reconstruction.samples());
    let amplitude_error = relative_l2(spectrum.amplitude(), &amplitude_model);
    Ok(Decomposition {
        spectrum,
        ledger,
        models,
        phase_invalid_atoms,
        amplitude_model,
        model_spectrum,
        reconstruction,
        roundtrip_error,
        time_error,
        amplitude_error,
    })
}

/// `metric,value` rows summarizing a decomposition.
pub fn report_rows(d: &Decomposition) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = vec![
        ("method".into(), d.ledger.method.as_str().into()),
        ("levels".into(), d.ledger.levels.len().to_string()),
        (
            "stop_reason".into(),
            serde_json::to_value(d.ledger.stop_reason)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
        ),
        ("eps_stop".into(), d.ledger.eps_stop.to_string()),
        ("original_sq_norm".into(), d.ledger.original_sq_norm.to_string()),
    ];
    let mut total = 0;
    for (n, l) in d.ledger.levels.iter().enumerate() {
        total += l.atom_count;
        rows.push((format!("level_{n}_atoms"), l.atom_count.to_string()));
        rows.push((format!("level_{n}_total_atoms"), total.to_string()));
        if let Some(q) = l.q_max {
            rows.push((format!("level_{n}_q_max"), q.to_string()));
        }
        rows.push((format!("level_{n}_residual_sq_norm"), l.residual_sq_norm.to_string()));
        rows.push((format!("level_{n}_residual_max"), l.residual_max.to_string()));
        rows.push((format!("level_{n}_residual_min"), l.residual_min.to_string()));
        rows.push((format!("level_{n}_converged"), l.converged.to_string()));
    }
    rows.push(("amplitude_rel_error".into(), d.amplitude_error.to_string()));
    rows.push(("roundtrip_error".into(), d.roundtrip_error.to_string()));
    rows.push(("time_rel_error".into(), d.time_error.to_string()));
    rows.push(("phase_invalid_atoms".into(), d.phase_invalid_atoms.to_string()));
    let mut warnings = Vec::new();
    let unconverged: Vec<String> =
        d.ledger.levels.iter().enumerate().filter(|(_, l)| !l.converged).map(|(n, _)| n.to_string()).collect();
    if !unconverged.is_empty() {
        warnings.push(format!("fit did not converge at level(s) {}", unconverged.join(" ")));
    }
    if let Some(f) = &d.ledger.failure {
        warnings.push(format!("refinement stopped early: {f}"));
    }
    if d.spectrum.boundary_warning() {
        warnings.push("amplitude is not negligible at the band edge".into());
    }
    if d.phase_invalid_atoms > 0 {
        warnings.push(format!("{} atom(s) sit where the phase is undefined", d.phase_invalid_atoms));
    }
    rows.push(("warning".into(), warnings.join("; ")));
    rows
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub reconstruction: RealSignal<f64>,
    /// Relative L² error of the reconstruction on the signal grid.
    pub time_error: f64,
    /// Relative error between the spectra of the signal and of the reconstruction.
    pub freq_error: f64,
    /// Relative error between the signal spectrum and the closed-form model spectrum.
    pub model_freq_error: f64,
}

/// Synthesizes `models` on the grid of `signal` and compares in both domains.
pub fn roundtrip(
    signal: &RealSignal<f64>,
    models: &[ChirpletModel<f64>],
    omega_max: f64,
    n_freq: usize,
) -> Result<RoundtripReport> {
    if let Some(a) = models.iter().flat_map(|m| m.atoms.iter()).find(|a| a.omega > omega_max) {
        return Err(Error::input(format!(
            "model atom at ω = {} lies outside the analysis band [0, {omega_max}]",
            a.omega
        )));
    }
    let reconstruction = synthesize_levels(models, &signal.time_grid())?;
    let spec = compute_spectrum(signal, omega_max, n_freq)?;
    let rec_spec = compute_spectrum(&reconstruction, omega_max, n_freq)?;
    let freq_error = roundtrip_error(&spec, &rec_spec.complex_values())?;
    let model_freq_error = roundtrip_error(&spec, &levels_spectrum(models, &spec.grid().omegas()))?;
    let time_error = relative_l2(signal.samples(), reconstruction.samples());
    Ok(RoundtripReport { reconstruction, time_error, freq_error, model_freq_error })
}
