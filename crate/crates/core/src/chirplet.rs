//! Gaussian chirplet model: local quadratic phase at each atom and the closed
//! form real chirp synthesis.
//!
//! Around an atom center the phase is replaced by its Taylor polynomial
//! `ψ(ω) ≈ γ + t (ω - ω_k) + κ (ω - ω_k)² / 2`, which turns each Gaussian
//! of the amplitude into a complex Gaussian whose inverse transform is a
//! real Gaussian chirp.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::gaussian::SignedMixture;
use crate::grid::TimeGrid;
use crate::linalg::least_squares;
use crate::scalar::{lit, Scalar};
use crate::spectrum::{PhaseSamples, RealSignal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpAtom<T> {
    pub alpha: T,
    pub omega: T,
    pub sigma: T,
    pub gamma: T,
    pub t: T,
    pub kappa: T,
}

/// Center term `α₀ e^{-ω²/2σ₀} e^{-j t₀ ω}`; `α₀` may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterChirp<T> {
    pub alpha0: T,
    pub sigma0: T,
    pub t0: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChirpletModel<T> {
    pub center: Option<CenterChirp<T>>,
    /// Ordered by `omega`.
    pub atoms: Vec<ChirpAtom<T>>,
}

impl<T: Scalar> ChirpletModel<T> {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.center {
            if !(c.sigma0 > T::zero()) || !c.alpha0.is_finite() || !c.t0.is_finite() {
                return Err(Error::domain("invalid center chirp"));
            }
        }
        for (k, a) in self.atoms.iter().enumerate() {
            if !(a.sigma > T::zero()) || !(a.alpha > T::zero()) {
                return Err(Error::domain(format!("chirp atom {k} needs positive weight and width")));
            }
            if [a.omega, a.gamma, a.t, a.kappa].iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("chirp atom {k} has a non-finite parameter")));
            }
        }
        if self.atoms.windows(2).any(|w| !(w[0].omega < w[1].omega)) {
            return Err(Error::input("chirp atom centers must be strictly increasing"));
        }
        Ok(())
    }

    /// `6p + 3` with a center term, `6p` without.
    pub fn parameter_count(&self) -> usize {
        6 * self.atoms.len() + if self.center.is_some() { 3 } else { 0 }
    }
}

/// How [`build_model_with`] treats atoms whose stencil touches samples
/// flagged invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhasePolicy {
    /// Fail with [`Error::PhaseInvalid`].
    Strict,
    /// Use the held values stored at invalid samples.
    Hold,
}

/// Local `(γ, t, κ) = (ψ, ψ', ψ'')` at `omega_c` from the degree-4
/// polynomial through the five grid samples nearest to it.
pub fn phase_taylor<T: Scalar>(phase: &PhaseSamples<T>, omega_c: T) -> Result<(T, T, T)> {
    taylor_with(phase, omega_c, PhasePolicy::Strict)
}

/// True when every stencil sample used at `omega_c` is valid.
pub fn phase_valid_at<T: Scalar>(phase: &PhaseSamples<T>, omega_c: T) -> bool {
    phase_taylor(phase, omega_c).is_ok()
}

fn taylor_with<T: Scalar>(phase: &PhaseSamples<T>, omega_c: T, policy: PhasePolicy) -> Result<(T, T, T)> {
    let grid = &phase.grid;
    let h = grid.step();
    let n = grid.half_len() as i64;
    let invalid = || Error::PhaseInvalid { omega: omega_c.as_f64(), atom: None };
    let pos = (omega_c / h).round().to_i64().ok_or_else(invalid)?;
    if pos - 2 < -n || pos + 2 > n {
        return Err(invalid());
    }
    // An odd phase anchored at ψ(0) = π is continuous across the origin only
    // after shifting the negative side by 2ψ(0).
    let shift = lit::<T>(2.0) * phase.values[grid.origin_index()];
    let mut a = Vec::with_capacity(25);
    let mut b = Vec::with_capacity(5);
    for m in -2..=2 {
        let idx = (pos + m + n) as usize;
        if policy == PhasePolicy::Strict && !phase.valid[idx] {
            return Err(invalid());
        }
        let u = (grid.omega(idx) - omega_c) / h;
        let mut p = T::one();
        for _ in 0..5 {
            a.push(p);
            p = p * u;
        }
        b.push(if pos + m < 0 { phase.values[idx] + shift } else { phase.values[idx] });
    }
    let c = least_squares(&a, 5, 5, &b)?;
    Ok((c[0], c[1] / h, lit::<T>(2.0) * c[2] / (h * h)))
}

/// `φ = ½ arg(1 + jκσ)`, in `(-π/4, π/4)`.
pub fn phase_offset<T: Scalar>(kappa: T, sigma: T) -> T {
    lit::<T>(0.5) * (kappa * sigma).atan2(T::one())
}

/// Real chirp sum, the exact inverse transform of [`model_spectrum`].
pub fn chirp_value<T: Scalar>(model: &ChirpletModel<T>, t: T) -> T {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let mut f = T::zero();
    if let Some(c) = &model.center {
        let d = t - c.t0;
        f = f + (two * T::PI() * c.sigma0).sqrt() * c.alpha0 * (-c.sigma0 * d * d * half).exp();
    }
    let amp = two * (two * T::PI()).sqrt();
    for a in &model.atoms {
        let d = t - a.t;
        let ks = a.kappa * a.sigma;
        let den = T::one() + ks * ks;
        let envelope = (-a.sigma * d * d / (two * den)).exp();
        let arg = ks * a.sigma * d * d / (two * den) + a.omega * t - a.gamma - phase_offset(a.kappa, a.sigma);
        f = f + amp * a.alpha * a.sigma.sqrt() * den.powf(lit(-0.25)) * envelope * arg.cos();
    }
    f
}

pub fn synthesize_chirps<T: Scalar>(model: &ChirpletModel<T>, times: &TimeGrid<T>) -> Result<RealSignal<T>> {
    model.validate()?;
    let samples = times.times().into_iter().map(|t| chirp_value(model, t)).collect();
    RealSignal::on_grid(*times, samples)
}

/// Model spectrum at one frequency.
pub fn model_spectrum_at<T: Scalar>(model: &ChirpletModel<T>, omega: T) -> Complex<T> {
    let two = lit::<T>(2.0);
    let mut h = Complex::new(T::zero(), T::zero());
    if let Some(c) = &model.center {
        let g = c.alpha0 * (-omega * omega / (two * c.sigma0)).exp();
        h = h + Complex::from_polar(g, -c.t0 * omega);
    }
    for a in &model.atoms {
        let x = omega - a.omega;
        let g = a.alpha * (-x * x / (two * a.sigma)).exp();
        h = h + Complex::from_polar(g, -(a.gamma + a.t * x + a.kappa * x * x / two));
        let y = omega + a.omega;
        let g = a.alpha * (-y * y / (two * a.sigma)).exp();
        h = h + Complex::from_polar(g, a.gamma - a.t * y + a.kappa * y * y / two);
    }
    h
}

pub fn model_spectrum<T: Scalar>(model: &ChirpletModel<T>, omegas: &[T]) -> Vec<Complex<T>> {
    omegas.iter().map(|&w| model_spectrum_at(model, w)).collect()
}

/// Attaches local phase data to every atom of `mixture`.
///
/// Atoms from the negative list keep a positive weight and get `γ + π`. The
/// center term takes `t₀ = ψ'(0)`; its chirp rate vanishes because the phase
/// is odd, and an offset `ψ(0) = π` is absorbed into the sign of `α₀`.
pub fn build_model<T: Scalar>(mixture: &SignedMixture<T>, phase: &PhaseSamples<T>) -> Result<ChirpletModel<T>> {
    build_model_with(mixture, phase, PhasePolicy::Strict)
}

/// [`build_model`] with an explicit policy for invalid phase samples.
pub fn build_model_with<T: Scalar>(
    mixture: &SignedMixture<T>,
    phase: &PhaseSamples<T>,
    policy: PhasePolicy,
) -> Result<ChirpletModel<T>> {
    let tag = |e: Error, atom: usize| match e {
        Error::PhaseInvalid { omega, .. } => Error::PhaseInvalid { omega, atom: Some(atom) },
        other => other,
    };
    let center = match &mixture.center {
        Some(c) => {
            let (psi0, t0, _) = taylor_with(phase, T::zero(), policy).map_err(|e| tag(e, 0))?;
            // ψ(0) is 0 or π; the latter flips the sign of the center term.
            let sign = if psi0.cos() < T::zero() { -T::one() } else { T::one() };
            Some(CenterChirp { alpha0: sign * c.alpha, sigma0: c.sigma, t0 })
        }
        None => None,
    };
    let offset = usize::from(center.is_some());
    let signed = mixture.positive.iter().map(|a| (a, T::zero())).chain(mixture.negative.iter().map(|a| (a, T::PI())));
    let mut atoms = Vec::with_capacity(mixture.positive.len() + mixture.negative.len());
    for (k, (a, shift)) in signed.enumerate() {
        let (gamma, t, kappa) = taylor_with(phase, a.omega_c, policy).map_err(|e| tag(e, k + offset))?;
        atoms.push(ChirpAtom { alpha: a.alpha, omega: a.omega_c, sigma: a.sigma, gamma: gamma + shift, t, kappa });
    }
    atoms.sort_by(|x, y| x.omega.partial_cmp(&y.omega).unwrap_or(std::cmp::Ordering::Equal));
    let model = ChirpletModel { center, atoms };
    model.validate()?;
    Ok(model)
}

/// Sum of the per-level chirp syntheses.
pub fn synthesize_levels<T: Scalar>(models: &[ChirpletModel<T>], times: &TimeGrid<T>) -> Result<RealSignal<T>> {
    let mut total = vec![T::zero(); times.len];
    for m in models {
        let s = synthesize_chirps(m, times)?;
        for (acc, v) in total.iter_mut().zip(s.samples()) {
            *acc = *acc + *v;
        }
    }
    RealSignal::on_grid(*times, total)
}

/// Sum of the per-level model spectra.
pub fn levels_spectrum<T: Scalar>(models: &[ChirpletModel<T>], omegas: &[T]) -> Vec<Complex<T>> {
    omegas
        .iter()
        .map(|&w| models.iter().fold(Complex::new(T::zero(), T::zero()), |acc, m| acc + model_spectrum_at(m, w)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::GaussianAtom;
    use crate::grid::FrequencyGrid;
    use std::f64::consts::PI;

    fn phase(psi: impl Fn(f64) -> f64) -> PhaseSamples<f64> {
        PhaseSamples::from_fn(FrequencyGrid::new(4.0, 400).unwrap(), psi)
    }

    #[test]
    fn cubic_phase_taylor() {
        let (g, t, k) = phase_taylor(&phase(|w| w.powi(3) / 50.0), 1.0).unwrap();
        assert!((g - 0.02).abs() < 1e-12 && (t - 0.06).abs() < 1e-12 && (k - 0.12).abs() < 1e-12);
        let (g, t, k) = phase_taylor(&phase(|w| w.powi(3) / 50.0), 1.2345).unwrap();
        assert!((g - 1.2345f64.powi(3) / 50.0).abs() < 1e-12);
        assert!((t - 3.0 * 1.2345f64.powi(2) / 50.0).abs() < 1e-11);
        assert!((k - 6.0 * 1.2345 / 50.0).abs() < 1e-9);
    }

    #[test]
    fn zero_and_quadratic_phase() {
        assert_eq!(phase_taylor(&phase(|_| 0.0), 0.7).unwrap(), (0.0, 0.0, 0.0));
        let (g, t, k) = phase_taylor(&phase(|w| 0.3 + 2.0 * w - 0.5 * w * w), 1.1).unwrap();
        assert!((g - (0.3 + 2.2 - 0.5 * 1.21)).abs() < 1e-12);
        assert!((t - (2.0 - 1.1)).abs() < 1e-11);
        assert!((k + 1.0).abs() < 1e-9);
    }

    #[test]
    fn taylor_outside_or_in_gap() {
        let mut p = phase(|w| w);
        assert!(phase_taylor(&p, 3.999).is_err());
        let i = p.grid.origin_index() + 100;
        p.valid[i] = false;
        assert!(matches!(phase_taylor(&p, p.grid.omega(i)), Err(Error::PhaseInvalid { .. })));
    }

    #[test]
    fn offsets() {
        assert_eq!(phase_offset(0.0, 1.0), 0.0);
        assert!((phase_offset(1.0, 1.0) - PI / 8.0).abs() < 1e-15);
        assert!((phase_offset(-2.0, 0.5) + PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn center_only_signal() {
        let m = ChirpletModel { center: Some(CenterChirp { alpha0: 1.0, sigma0: 1.0, t0: 0.0 }), atoms: vec![] };
        for t in [-1.0f64, 0.0, 0.5, 2.0] {
            assert!((chirp_value(&m, t) - (2.0 * PI).sqrt() * (-t * t / 2.0).exp()).abs() < 1e-14);
        }
        assert_eq!(m.parameter_count(), 3);
    }

    #[test]
    fn gabor_atom() {
        let a = ChirpAtom { alpha: 1.0, omega: 2.0, sigma: 0.5, gamma: 0.3, t: 1.0, kappa: 0.0 };
        let m = ChirpletModel { center: None, atoms: vec![a] };
        for t in [-1.0f64, 0.0, 0.5, 2.0] {
            let e =
                2.0 * (2.0 * PI * 0.5f64).sqrt() * (-0.5 * (t - 1.0f64).powi(2) / 2.0).exp() * (2.0 * t - 0.3f64).cos();
            assert!((chirp_value(&m, t) - e).abs() < 1e-13);
        }
    }

    #[test]
    fn spectrum_conjugate_symmetry() {
        let m = ChirpletModel {
            center: Some(CenterChirp { alpha0: -0.4, sigma0: 0.3, t0: 0.7 }),
            atoms: vec![
                ChirpAtom { alpha: 1.0, omega: 1.0, sigma: 0.2, gamma: 0.4, t: -1.0, kappa: 2.0 },
                ChirpAtom { alpha: 0.5, omega: 2.5, sigma: 0.1, gamma: -1.4, t: 3.0, kappa: -0.5 },
            ],
        };
        for w in [0.0f64, 0.3, 1.0, 2.2, 3.7] {
            let d = model_spectrum_at(&m, w).conj() - model_spectrum_at(&m, -w);
            assert!(d.norm() <= 1e-14 * model_spectrum_at(&m, w).norm().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn model_from_mixture_with_linear_phase() {
        let mix = SignedMixture::from_signed_atoms([
            GaussianAtom::center(0.5, 0.2),
            GaussianAtom::pair(2.0, 1.0, 0.1),
            GaussianAtom::pair(-1.0, 2.0, 0.1),
        ])
        .unwrap();
        let m = build_model(&mix, &phase(|w| 1.5 * w)).unwrap();
        assert!((m.center.unwrap().t0 - 1.5).abs() < 1e-12);
        let a = m.atoms[0];
        assert!((a.t - 1.5).abs() < 1e-11 && (a.gamma - 1.5).abs() < 1e-12 && a.kappa.abs() < 1e-8);
        let b = m.atoms[1];
        assert!((b.gamma - 3.0 - PI).abs() < 1e-12 && b.alpha == 1.0);
        assert_eq!(m.parameter_count(), 15);
    }

    #[test]
    fn invalid_phase_names_atom() {
        let mix = SignedMixture::from_signed_atoms([GaussianAtom::pair(2.0, 1.0, 0.1)]).unwrap();
        let mut p = phase(|w| w);
        let i = p.grid.origin_index() + 100;
        p.valid[i] = false;
        assert!(matches!(build_model(&mix, &p), Err(Error::PhaseInvalid { atom: Some(0), .. })));
        assert!(build_model_with(&mix, &p, PhasePolicy::Hold).is_ok());
    }

    #[test]
    fn center_with_pi_anchored_phase() {
        // Odd mirror of ψ = π + 0.5ω on the positive side, as unwrapping leaves it
        // when the even part is negative at the origin.
        let p = phase(|w| if w >= 0.0 { PI + 0.5 * w } else { -(PI - 0.5 * w) });
        let (g, t, k) = phase_taylor(&p, 0.0).unwrap();
        assert!((g - PI).abs() < 1e-12 && (t - 0.5).abs() < 1e-10 && k.abs() < 1e-8);
        let mix = SignedMixture::from_signed_atoms([GaussianAtom::center(0.5, 0.2)]).unwrap();
        let c = build_model(&mix, &p).unwrap().center.unwrap();
        assert!((c.alpha0 + 0.5).abs() < 1e-15 && (c.t0 - 0.5).abs() < 1e-10);
    }
}
