//! Real band-limited signals and their sampled spectra.
//!
//! Transform pair used throughout the crate:
//!
//! ```text
//! f(t) = ∫ e^{jωt} H(ω) dω          over [-Ω, Ω]
//! H(ω) = (1/2π) ∫ e^{-jωt} f(t) dt
//! H    = H_e - j H_o = A e^{-jψ}
//! ```
//!
//! With this normalization the closed-form chirp synthesis in
//! [`crate::chirplet::synthesize_chirps`] is exactly the inverse transform of
//! [`crate::chirplet::model_spectrum`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, GridFunction, TimeGrid};
use crate::scalar::{lit, Scalar};

/// Relative phase-validity floor: phase is trusted where `A > floor * max(A)`.
pub const DEFAULT_PHASE_FLOOR: f64 = 1e-6;
/// Amplitude at `±Ω` above this fraction of `max(A)` raises the boundary warning.
pub const BOUNDARY_TOLERANCE: f64 = 1e-3;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal<T> {
    samples: Vec<T>,
    t_start: T,
    dt: T,
}

impl<T: Scalar> RealSignal<T> {
    pub fn new(samples: Vec<T>, t_start: T, dt: T) -> Result<Self> {
        TimeGrid::new(t_start, dt, samples.len())?;
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, t_start, dt })
    }

    pub fn on_grid(grid: TimeGrid<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(Error::input("sample count does not match time grid"));
        }
        Self::new(samples, grid.t_start, grid.dt)
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    #[inline]
    pub fn t_start(&self) -> T {
        self.t_start
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_grid(&self) -> TimeGrid<T> {
        TimeGrid { t_start: self.t_start, dt: self.dt, len: self.samples.len() }
    }

    pub fn times(&self) -> Vec<T> {
        self.time_grid().times()
    }

    pub fn rms(&self) -> T {
        let n = T::from_usize_lossy(self.samples.len());
        (self.samples.iter().map(|&v| v * v).sum::<T>() / n).sqrt()
    }
}

/// Unwrapped phase on a frequency grid with per-sample validity.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSamples<T> {
    pub grid: FrequencyGrid<T>,
    pub values: Vec<T>,
    pub valid: Vec<bool>,
}

impl<T: Scalar> PhaseSamples<T> {
    /// Phase with every sample valid, built from an analytic function.
    pub fn from_fn(grid: FrequencyGrid<T>, psi: impl Fn(T) -> T) -> Self {
        let values = grid.omegas().into_iter().map(psi).collect();
        Self { grid, values, valid: vec![true; grid.len()] }
    }
}

/// Result of [`unwrap_phase`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnwrappedPhase<T> {
    pub phase: Vec<T>,
    pub valid: Vec<bool>,
}

/// Spectrum `H = H_e - j H_o` sampled on the symmetric lattice, with its
/// derived amplitude and unwrapped phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum<T> {
    grid: FrequencyGrid<T>,
    h_even: Vec<T>,
    h_odd: Vec<T>,
    amplitude: Vec<T>,
    phase: Vec<T>,
    phase_valid: Vec<bool>,
    phase_floor: T,
    boundary_warning: bool,
}

impl<T: Scalar> SampledSpectrum<T> {
    /// Builds a spectrum from even/odd parts, checking their symmetry.
    pub fn from_even_odd(grid: FrequencyGrid<T>, h_even: Vec<T>, h_odd: Vec<T>) -> Result<Self> {
        Self::with_phase_floor(grid, h_even, h_odd, lit(DEFAULT_PHASE_FLOOR))
    }

    /// Like [`Self::from_even_odd`] with an explicit relative phase floor.
    pub fn with_phase_floor(grid: FrequencyGrid<T>, h_even: Vec<T>, h_odd: Vec<T>, relative_floor: T) -> Result<Self> {
        if h_even.len() != grid.len() || h_odd.len() != grid.len() {
            return Err(Error::input(format!(
                "spectrum arrays must have {} entries, got {} and {}",
                grid.len(),
                h_even.len(),
                h_odd.len()
            )));
        }
        if h_even.iter().chain(&h_odd).any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite spectrum value"));
        }
        if !(relative_floor > T::zero()) {
            return Err(Error::domain("phase floor must be positive"));
        }
        let scale = h_even.iter().chain(&h_odd).fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = lit::<T>(SYMMETRY_TOLERANCE) * scale;
        for i in 0..grid.len() {
            let m = grid.mirror(i);
            if (h_even[i] - h_even[m]).abs() > tol {
                return Err(Error::input(format!("h_even is not even at index {i}")));
            }
            if (h_odd[i] + h_odd[m]).abs() > tol {
                return Err(Error::input(format!("h_odd is not odd at index {i}")));
            }
        }
        let amplitude: Vec<T> = h_even.iter().zip(&h_odd).map(|(&e, &o)| e.hypot(o)).collect();
        let a_max = amplitude.iter().copied().fold(T::zero(), T::max);
        let floor = relative_floor * a_max;
        let (phase, phase_valid) = if a_max > T::zero() {
            let u = unwrap_phase(&h_even, &h_odd, &amplitude, floor.max(T::min_positive_value()))?;
            (u.phase, u.valid)
        } else {
            (vec![T::zero(); grid.len()], vec![false; grid.len()])
        };
        let edge = amplitude[0].max(amplitude[grid.len() - 1]);
        let boundary_warning = a_max > T::zero() && edge >= lit::<T>(BOUNDARY_TOLERANCE) * a_max;
        Ok(Self { grid, h_even, h_odd, amplitude, phase, phase_valid, phase_floor: floor, boundary_warning })
    }

    /// Builds a spectrum from complex values `H(omega_p)`, symmetrizing them.
    pub fn from_complex(grid: FrequencyGrid<T>, h: &[Complex<T>]) -> Result<Self> {
        if h.len() != grid.len() {
            return Err(Error::input("complex spectrum length does not match grid"));
        }
        let half = lit::<T>(0.5);
        let mut h_even = vec![T::zero(); grid.len()];
        let mut h_odd = vec![T::zero(); grid.len()];
        for i in 0..grid.len() {
            let m = grid.mirror(i);
            // H_e = Re H, H_o = -Im H, averaged with the conjugate mirror.
            h_even[i] = half * (h[i].re + h[m].re);
            h_odd[i] = -half * (h[i].im - h[m].im);
        }
        Self::from_even_odd(grid, h_even, h_odd)
    }

    /// Spectrum `A e^{-jψ}` from analytic amplitude and phase.
    pub fn from_amplitude_phase(
        grid: FrequencyGrid<T>,
        amplitude: impl Fn(T) -> T,
        phase: impl Fn(T) -> T,
    ) -> Result<Self> {
        let n = grid.half_len();
        let mut h_even = vec![T::zero(); grid.len()];
        let mut h_odd = vec![T::zero(); grid.len()];
        for p in 0..=n {
            let w = grid.omega(n + p);
            let (a, psi) = (amplitude(w), phase(w));
            let (s, c) = psi.sin_cos();
            h_even[n + p] = a * c;
            h_even[n - p] = a * c;
            h_odd[n + p] = if p == 0 { T::zero() } else { a * s };
            h_odd[n - p] = -h_odd[n + p];
        }
        Self::from_even_odd(grid, h_even, h_odd)
    }

    #[inline]
    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }
    #[inline]
    pub fn omega_max(&self) -> T {
        self.grid.omega_max()
    }
    #[inline]
    pub fn n_freq(&self) -> usize {
        self.grid.half_len()
    }
    #[inline]
    pub fn h_even(&self) -> &[T] {
        &self.h_even
    }
    #[inline]
    pub fn h_odd(&self) -> &[T] {
        &self.h_odd
    }
    #[inline]
    pub fn amplitude(&self) -> &[T] {
        &self.amplitude
    }
    #[inline]
    pub fn phase(&self) -> &[T] {
        &self.phase
    }
    #[inline]
    pub fn phase_valid(&self) -> &[bool] {
        &self.phase_valid
    }
    /// Absolute amplitude floor below which phase is invalid.
    #[inline]
    pub fn phase_floor(&self) -> T {
        self.phase_floor
    }
    /// True when the amplitude does not vanish at `±Ω`.
    #[inline]
    pub fn boundary_warning(&self) -> bool {
        self.boundary_warning
    }

    /// `H(omega_p) = H_e - j H_o` at storage index `idx`.
    #[inline]
    pub fn value(&self, idx: usize) -> Complex<T> {
        Complex::new(self.h_even[idx], -self.h_odd[idx])
    }

    pub fn complex_values(&self) -> Vec<Complex<T>> {
        (0..self.grid.len()).map(|i| self.value(i)).collect()
    }

    pub fn amplitude_fn(&self) -> GridFunction<T> {
        GridFunction::new(self.grid, self.amplitude.clone()).expect("amplitude matches its grid")
    }

    pub fn phase_samples(&self) -> Result<PhaseSamples<T>> {
        if !self.phase_valid.iter().any(|&v| v) {
            return Err(Error::degenerate("spectrum amplitude vanishes everywhere"));
        }
        Ok(PhaseSamples { grid: self.grid, values: self.phase.clone(), valid: self.phase_valid.clone() })
    }
}

/// Forward transform of `signal` by composite trapezoid over its sampled support.
pub fn compute_spectrum<T: Scalar>(signal: &RealSignal<T>, omega_max: T, n_freq: usize) -> Result<SampledSpectrum<T>> {
    let grid = FrequencyGrid::new(omega_max, n_freq)?;
    if signal.len() < 2 {
        return Err(Error::input("signal needs at least two samples for quadrature"));
    }
    let times = signal.times();
    let m = times.len();
    let half = lit::<T>(0.5);
    let scale = signal.dt() / T::TAU();
    let n = grid.half_len();
    let mut h_even = vec![T::zero(); grid.len()];
    let mut h_odd = vec![T::zero(); grid.len()];
    for p in 0..=n {
        let w = grid.omega(n + p);
        let (mut ce, mut co) = (T::zero(), T::zero());
        for (k, (&t, &f)) in times.iter().zip(signal.samples()).enumerate() {
            let wt = if k == 0 || k + 1 == m { half } else { T::one() };
            let (s, c) = (w * t).sin_cos();
            ce = ce + wt * c * f;
            co = co + wt * s * f;
        }
        h_even[n + p] = scale * ce;
        h_even[n - p] = scale * ce;
        if p > 0 {
            h_odd[n + p] = scale * co;
            h_odd[n - p] = -scale * co;
        }
    }
    SampledSpectrum::from_even_odd(grid, h_even, h_odd)
}

/// Unwraps `ψ` from `cos ψ = H_e / A`, `sin ψ = H_o / A` on a symmetric grid.
///
/// The positive half is unwrapped outward from the origin and mirrored, so the
/// result is exactly odd. Samples with `A <= floor` are flagged invalid and
/// hold the last valid value; unwrapping resumes relative to that value.
pub fn unwrap_phase<T: Scalar>(h_even: &[T], h_odd: &[T], amplitude: &[T], floor: T) -> Result<UnwrappedPhase<T>> {
    let len = h_even.len();
    if h_odd.len() != len || amplitude.len() != len {
        return Err(Error::input("phase inputs must have equal lengths"));
    }
    if len.is_multiple_of(2) || len < 3 {
        return Err(Error::input("phase inputs must cover a symmetric grid of odd length"));
    }
    if !(floor > T::zero()) {
        return Err(Error::domain("phase floor must be positive"));
    }
    if !amplitude.iter().any(|&a| a > floor) {
        return Err(Error::degenerate("amplitude is below the phase floor everywhere"));
    }
    let n = len / 2;
    let pi = T::PI();
    let tau = T::TAU();
    let mut phase = vec![T::zero(); len];
    let mut valid = vec![false; len];

    // Origin: ψ(0) = 0, or π when H_e(0) < 0 (odd modulo 2π).
    let mut last = T::zero();
    let mut last_raw: Option<T> = None;
    if amplitude[n] > floor {
        valid[n] = true;
        last = if h_even[n] < T::zero() { pi } else { T::zero() };
        last_raw = Some(last);
        phase[n] = last;
    }
    for p in 1..=n {
        let i = n + p;
        if amplitude[i] <= floor {
            phase[i] = last;
            continue;
        }
        let raw = h_odd[i].atan2(h_even[i]);
        let next = match last_raw {
            None => raw,
            Some(prev) => {
                let mut d = raw - prev;
                d = d - tau * ((d + pi) / tau).floor();
                last + d
            }
        };
        phase[i] = next;
        valid[i] = true;
        last = next;
        last_raw = Some(raw);
    }
    for p in 1..=n {
        phase[n - p] = -phase[n + p];
        valid[n - p] = valid[n + p];
    }
    Ok(UnwrappedPhase { phase, valid })
}

/// Value of the trapezoid synthesis sum at time `t` including the imaginary residue.
pub fn standard_sum<T: Scalar>(spec: &SampledSpectrum<T>, t: T) -> Complex<T> {
    let grid = spec.grid();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..grid.len() {
        let (s, c) = (grid.omega(i) * t).sin_cos();
        acc = acc + Complex::new(c, s) * spec.value(i) * grid.weight(i);
    }
    acc
}

/// Trapezoid discretization `f_N` of the inverse transform, evaluated on `times`.
///
/// `f_N` is periodic with period `2Nπ/Ω`.
pub fn synthesize_standard<T: Scalar>(spec: &SampledSpectrum<T>, times: &TimeGrid<T>) -> Result<RealSignal<T>> {
    let grid = spec.grid();
    let samples = times
        .times()
        .into_iter()
        .map(|t| {
            (0..grid.len())
                .map(|i| {
                    let (s, c) = (grid.omega(i) * t).sin_cos();
                    grid.weight(i) * (spec.h_even()[i] * c + spec.h_odd()[i] * s)
                })
                .sum()
        })
        .collect();
    RealSignal::on_grid(*times, samples)
}

/// Samples of a signal on the lattice `t_n = nπ/Ω`, `n = -N..N-1`.
pub fn lattice_samples<T: Scalar>(spec: &SampledSpectrum<T>) -> Result<RealSignal<T>> {
    synthesize_standard(spec, &TimeGrid::lattice(spec.grid()))
}

/// Recovers `H(pΩ/N)`, `p = -N..=N`, from the `2N` lattice samples of `f_N`.
///
/// For `|p| < N` this inverts the trapezoid synthesis exactly. At `p = ±N`
/// it returns `(1/2Ω) Σ (-1)^n f_N(t_n)`, which vanishes for band-limited input.
pub fn lattice_coefficients<T: Scalar>(samples: &[T], omega_max: T) -> Result<Vec<Complex<T>>> {
    if samples.len() < 4 || !samples.len().is_multiple_of(2) {
        return Err(Error::input(format!(
            "lattice inversion needs an even number (>= 4) of samples, got {}",
            samples.len()
        )));
    }
    let grid = FrequencyGrid::new(omega_max, samples.len() / 2)?;
    let n = grid.half_len() as i64;
    let period = 2 * n;
    let norm = T::one() / (lit::<T>(2.0) * omega_max);
    let unit = T::PI() / T::from_i64(n).unwrap();
    let out = (-n..=n)
        .map(|p| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &f) in samples.iter().enumerate() {
                let idx = k as i64 - n;
                let m = (p * idx).rem_euclid(period);
                let (s, c) = (unit * T::from_i64(m).unwrap()).sin_cos();
                acc = acc + Complex::new(c, -s) * f;
            }
            acc * norm
        })
        .collect();
    Ok(out)
}

/// The two alternating sums `Σ e^{∓jnπ} f_N(t_n)`; both vanish for band-limited `f_N`.
pub fn alternating_sums<T: Scalar>(samples: &[T]) -> (T, T) {
    let n = (samples.len() / 2) as i64;
    let s: T = samples.iter().enumerate().map(|(k, &f)| if (k as i64 - n).rem_euclid(2) == 0 { f } else { -f }).sum();
    // e^{-jnπ} = e^{jnπ} = (-1)^n on the integer lattice.
    (s, s)
}

/// Even/odd lattice coefficients `(H_e, H_o)` for `p = 0..N-1` from lattice samples.
pub fn lattice_even_odd<T: Scalar>(samples: &[T], omega_max: T) -> Result<(Vec<T>, Vec<T>)> {
    if samples.len() < 4 || !samples.len().is_multiple_of(2) {
        return Err(Error::input("lattice inversion needs an even number (>= 4) of samples"));
    }
    let n = samples.len() / 2;
    let at = |idx: i64| samples[(idx + n as i64) as usize];
    let norm = T::one() / (lit::<T>(2.0) * omega_max);
    let unit = T::PI() / T::from_usize_lossy(n);
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let f_minus_n = at(-(n as i64));
    let mut h_e = Vec::with_capacity(n);
    let mut h_o = Vec::with_capacity(n);
    for p in 0..n {
        let mut e = at(0);
        let mut o = T::zero();
        for k in 1..n {
            let fe = half * (at(k as i64) + at(-(k as i64)));
            let fo = half * (at(k as i64) - at(-(k as i64)));
            let m = (p * k) % (2 * n);
            let (s, c) = (unit * T::from_usize_lossy(m)).sin_cos();
            e = e + two * c * fe;
            o = o + two * s * fo;
        }
        // n = N term: f_{N,e}(Nπ/Ω) = f_N(-Nπ/Ω) by periodicity, f_{N,o} = 0.
        let sign = if p % 2 == 0 { T::one() } else { -T::one() };
        e = e + sign * f_minus_n;
        h_e.push(norm * e);
        h_o.push(norm * o);
    }
    Ok((h_e, h_o))
}

/// Relative L² distance (trapezoid weights) between `spec` and `model` on the grid.
pub fn roundtrip_error<T: Scalar>(spec: &SampledSpectrum<T>, model: &[Complex<T>]) -> Result<T> {
    let grid = spec.grid();
    if model.len() != grid.len() {
        return Err(Error::input("model spectrum must be sampled on the same grid"));
    }
    let (mut num, mut den) = (T::zero(), T::zero());
    for (i, m) in model.iter().enumerate() {
        let h = spec.value(i);
        num = num + grid.weight(i) * (h - m).norm_sqr();
        den = den + grid.weight(i) * h.norm_sqr();
    }
    if !(den > T::zero()) {
        return Err(Error::degenerate("original spectrum has zero norm"));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> FrequencyGrid<f64> {
        FrequencyGrid::new(4.0, n).unwrap()
    }

    fn smooth_spec(n: usize) -> SampledSpectrum<f64> {
        // vanishes at ±4 to machine precision
        SampledSpectrum::from_amplitude_phase(
            grid(n),
            |w| (-(w - 1.5) * (w - 1.5) / 0.1).exp() + (-(w + 1.5) * (w + 1.5) / 0.1).exp(),
            |w| 0.4 * w + w * w * w / 50.0,
        )
        .unwrap()
    }

    #[test]
    fn even_gaussian_signal_has_no_odd_part() {
        let dt = 0.05;
        let t0 = -20.0;
        let samples: Vec<f64> = (0..801)
            .map(|k| t0 + k as f64 * dt)
            .map(|t| (2.0 * std::f64::consts::PI).sqrt() * (-t * t / 2.0).exp())
            .collect();
        let sig = RealSignal::new(samples, t0, dt).unwrap();
        let spec = compute_spectrum(&sig, 4.0, 64).unwrap();
        assert!(spec.h_odd().iter().all(|v| v.abs() < 1e-12));
        // (1/2π)·∫√(2π) e^{-t²/2} e^{-jωt} dt = e^{-ω²/2}
        for i in 0..spec.grid().len() {
            let w = spec.grid().omega(i);
            assert!((spec.h_even()[i] - (-w * w / 2.0).exp()).abs() < 1e-10);
        }
        assert!(spec.phase().iter().all(|&p| p.abs() < 1e-11));
    }

    #[test]
    fn cosine_burst_peaks_near_carrier() {
        let w1 = 2.0;
        let dt = 0.05;
        let t0 = -30.0;
        let samples: Vec<f64> =
            (0..1201).map(|k| t0 + k as f64 * dt).map(|t| (w1 * t).cos() * (-t * t / 50.0).exp()).collect();
        let spec = compute_spectrum(&RealSignal::new(samples, t0, dt).unwrap(), 4.0, 200).unwrap();
        let a = spec.amplitude();
        let n = spec.n_freq();
        let (imax, _) =
            a[n..].iter().enumerate().fold((0, f64::MIN), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        assert!((spec.grid().omega(n + imax) - w1).abs() <= spec.grid().step());
        assert_eq!(a[n + imax], a[n - imax]);
    }

    #[test]
    fn rejects_bad_domain() {
        let sig = RealSignal::new(vec![1.0, 2.0, 3.0], 0.0, 1.0).unwrap();
        assert!(matches!(compute_spectrum(&sig, 0.0, 8), Err(Error::Domain(_))));
        assert!(matches!(compute_spectrum(&sig, -1.0, 8), Err(Error::Domain(_))));
        assert!(matches!(RealSignal::new(vec![1.0, f64::NAN], 0.0, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn unwrap_zero_odd_part_is_zero() {
        let he = vec![1.0, 2.0, 3.0, 2.0, 1.0];
        let ho = vec![0.0; 5];
        let u = unwrap_phase(&he, &ho, &he, 1e-6).unwrap();
        assert!(u.phase.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn unwrap_cubic_phase() {
        let g = FrequencyGrid::new(6.0, 600).unwrap();
        let spec =
            SampledSpectrum::from_amplitude_phase(g, |w: f64| (-w * w / 8.0).exp(), |w: f64| w * w * w / 50.0).unwrap();
        for i in 0..g.len() {
            if spec.phase_valid()[i] {
                let w = g.omega(i);
                assert!((spec.phase()[i] - w * w * w / 50.0).abs() < 1e-9, "at {w}");
            }
        }
    }

    #[test]
    fn unwrap_adversarial_linear_wrap() {
        let g = FrequencyGrid::new(2.0, 100).unwrap();
        let psi = |w: f64| 3.0 * std::f64::consts::PI * w / 2.0;
        let spec = SampledSpectrum::from_amplitude_phase(g, |_| 1.0, psi).unwrap();
        for i in 1..g.len() {
            assert!((spec.phase()[i] - spec.phase()[i - 1]).abs() < std::f64::consts::PI);
            assert!((spec.phase()[i] - psi(g.omega(i))).abs() < 1e-9);
        }
    }

    #[test]
    fn unwrap_degenerate() {
        let z = vec![0.0; 5];
        assert!(matches!(unwrap_phase(&z, &z, &z, 1e-6), Err(Error::Degenerate(_))));
    }

    #[test]
    fn zero_spectrum_synthesizes_zero() {
        let g = grid(8);
        let spec = SampledSpectrum::from_even_odd(g, vec![0.0; 17], vec![0.0; 17]).unwrap();
        let sig = synthesize_standard(&spec, &TimeGrid::new(-3.0, 0.1, 61).unwrap()).unwrap();
        assert!(sig.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn standard_synthesis_is_periodic_and_real() {
        let spec = smooth_spec(32);
        let period = 2.0 * 32.0 * std::f64::consts::PI / 4.0;
        for t in [-3.3, 0.0, 1.7, 12.5] {
            let a = standard_sum(&spec, t);
            let b = standard_sum(&spec, t + period);
            assert!((a.re - b.re).abs() < 1e-10 * a.norm().max(1.0));
            assert!(a.im.abs() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn lattice_roundtrip_is_exact() {
        let spec = smooth_spec(32);
        let lat = lattice_samples(&spec).unwrap();
        let h = lattice_coefficients(lat.samples(), 4.0).unwrap();
        let scale = spec.amplitude().iter().copied().fold(0.0, f64::max);
        for (i, hv) in h.iter().enumerate() {
            assert!((hv - spec.value(i)).norm() <= 1e-10 * scale, "index {i}");
        }
        let (s1, s2) = alternating_sums(lat.samples());
        assert!(s1.abs() < 1e-10 * scale && s2.abs() < 1e-10 * scale);
    }

    #[test]
    fn lattice_of_constant() {
        let n = 8;
        let c = 2.5;
        let h = lattice_coefficients(&vec![c; 2 * n], 4.0).unwrap();
        for (i, v) in h.iter().enumerate() {
            let expect = if i == n { c * n as f64 / 4.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-12, "p = {}", i as i64 - n as i64);
        }
    }

    #[test]
    fn lattice_even_odd_paths() {
        let spec = smooth_spec(16);
        let lat = lattice_samples(&spec).unwrap();
        let (he, ho) = lattice_even_odd(lat.samples(), 4.0).unwrap();
        for p in 0..16 {
            assert!((he[p] - spec.h_even()[16 + p]).abs() < 1e-10);
            assert!((ho[p] - spec.h_odd()[16 + p]).abs() < 1e-10);
        }
        // symmetric samples: odd part vanishes
        let even = SampledSpectrum::from_amplitude_phase(grid(16), |w| (-w * w).exp(), |_| 0.0).unwrap();
        let (_, ho) = lattice_even_odd(lattice_samples(&even).unwrap().samples(), 4.0).unwrap();
        assert!(ho.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn lattice_wrong_count() {
        assert!(matches!(lattice_coefficients(&[1.0, 2.0, 3.0], 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn roundtrip_error_extremes() {
        let spec = smooth_spec(16);
        let h = spec.complex_values();
        assert_eq!(roundtrip_error(&spec, &h).unwrap(), 0.0);
        let zero = vec![Complex::new(0.0, 0.0); h.len()];
        assert!((roundtrip_error(&spec, &zero).unwrap() - 1.0).abs() < 1e-15);
        let z = SampledSpectrum::from_even_odd(grid(16), vec![0.0; 33], vec![0.0; 33]).unwrap();
        assert!(matches!(roundtrip_error(&z, &zero), Err(Error::Degenerate(_))));
    }

    #[test]
    fn boundary_warning_flags_nonvanishing_edges() {
        let s = SampledSpectrum::from_amplitude_phase(grid(16), |_| 1.0, |_| 0.0).unwrap();
        assert!(s.boundary_warning());
        assert!(!smooth_spec(16).boundary_warning());
    }

    #[test]
    fn spectrum_symmetry_is_checked() {
        let g = grid(2);
        assert!(SampledSpectrum::from_even_odd(g, vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0; 5]).is_err());
    }
}
