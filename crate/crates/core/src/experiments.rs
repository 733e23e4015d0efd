//! Synthetic test signals: the academic amplitude and the two-bump amplitude
//! with cubic or sinusoidal phase, optionally corrupted by white noise.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, TimeGrid};
use crate::scalar::{lit, Scalar};
use crate::spectrum::{synthesize_standard, RealSignal, SampledSpectrum};

/// `(4 - ω²)² (1/2 + ω²)` on `[-2, 2]`, zero outside.
/// Maxima `A(±1) = 13.5`, local minimum `A(0) = 8`.
pub fn academic_amplitude<T: Scalar>(omega: T) -> T {
    let w2 = omega * omega;
    let four = lit::<T>(4.0);
    if w2 >= four {
        return T::zero();
    }
    (four - w2) * (four - w2) * (lit::<T>(0.5) + w2)
}

/// `(e^{-a|ω|³} - e^{-b|ω|³}) / (b - a)` with `a = 0.8`, `b = 1.3`.
pub fn lolo_amplitude<T: Scalar>(omega: T) -> T {
    let a = lit::<T>(0.8);
    let b = lit::<T>(1.3);
    let c = omega.abs().powi(3);
    ((-a * c).exp() - (-b * c).exp()) / (b - a)
}

pub fn cubic_phase<T: Scalar>(omega: T) -> T {
    omega.powi(3) / lit(50.0)
}

/// `π (1 - e^{-ω²}) sin 2ω`.
pub fn sinusoidal_phase<T: Scalar>(omega: T) -> T {
    T::PI() * (T::one() - (-omega * omega).exp()) * (lit::<T>(2.0) * omega).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Academic amplitude, zero phase; `t = -256 + 0.25 n`, `n = 0..2048`.
    Academic,
    /// Two-bump amplitude, phase `ω³/50`; `t = -5.12 + 0.02 n`, `n = 0..511`.
    LoloCubic,
    /// Two-bump amplitude, phase `π(1 - e^{-ω²}) sin 2ω`; same grid.
    LoloSin,
}

impl Generator {
    pub const NAMES: [&'static str; 3] = ["academic", "lolo-cubic", "lolo-sin"];

    pub fn name(&self) -> &'static str {
        match self {
            Generator::Academic => "academic",
            Generator::LoloCubic => "lolo-cubic",
            Generator::LoloSin => "lolo-sin",
        }
    }

    pub fn time_grid<T: Scalar>(&self) -> TimeGrid<T> {
        match self {
            Generator::Academic => TimeGrid { t_start: lit(-256.0), dt: lit(0.25), len: 2049 },
            Generator::LoloCubic | Generator::LoloSin => TimeGrid { t_start: lit(-5.12), dt: lit(0.02), len: 512 },
        }
    }

    /// Band used for synthesis; the amplitude is negligible beyond it.
    pub fn synthesis_grid<T: Scalar>(&self) -> FrequencyGrid<T> {
        match self {
            Generator::Academic => FrequencyGrid::new(lit(2.0), 2048),
            Generator::LoloCubic | Generator::LoloSin => FrequencyGrid::new(lit(4.0), 2048),
        }
        .expect("static grid is valid")
    }

    pub fn amplitude<T: Scalar>(&self, omega: T) -> T {
        match self {
            Generator::Academic => academic_amplitude(omega),
            Generator::LoloCubic | Generator::LoloSin => lolo_amplitude(omega),
        }
    }

    pub fn phase<T: Scalar>(&self, omega: T) -> T {
        match self {
            Generator::Academic => T::zero(),
            Generator::LoloCubic => cubic_phase(omega),
            Generator::LoloSin => sinusoidal_phase(omega),
        }
    }

    pub fn spectrum<T: Scalar>(&self) -> Result<SampledSpectrum<T>> {
        SampledSpectrum::from_amplitude_phase(self.synthesis_grid(), |w| self.amplitude(w), |w| self.phase(w))
    }

    /// Noise-free signal on the generator's time grid.
    pub fn clean_signal<T: Scalar>(&self) -> Result<RealSignal<T>> {
        synthesize_standard(&self.spectrum()?, &self.time_grid())
    }

    /// Signal plus i.i.d. Gaussian noise of standard deviation
    /// `noise_sigma × RMS`. A seed is required whenever noise is added.
    pub fn signal<T: Scalar>(&self, noise_sigma: T, seed: Option<u64>) -> Result<RealSignal<T>> {
        let clean = self.clean_signal()?;
        add_noise(&clean, noise_sigma, seed)
    }
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "academic" => Ok(Generator::Academic),
            "lolo-cubic" => Ok(Generator::LoloCubic),
            "lolo-sin" => Ok(Generator::LoloSin),
            other => Err(Error::input(format!(
                "unknown generator {other:?}; expected one of {}",
                Generator::NAMES.join(", ")
            ))),
        }
    }
}

/// Adds white Gaussian noise relative to the signal RMS.
pub fn add_noise<T: Scalar>(signal: &RealSignal<T>, noise_sigma: T, seed: Option<u64>) -> Result<RealSignal<T>> {
    if !(noise_sigma >= T::zero()) || !noise_sigma.is_finite() {
        return Err(Error::domain("noise level must be a non-negative number"));
    }
    if noise_sigma == T::zero() {
        return Ok(signal.clone());
    }
    let seed = seed.ok_or_else(|| Error::input("a seed is required when noise is added"))?;
    let sd = (noise_sigma * signal.rms()).as_f64();
    let normal = Normal::new(0.0, sd).map_err(|e| Error::domain(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples = signal.samples().iter().map(|&x| x + lit::<T>(normal.sample(&mut rng))).collect();
    RealSignal::new(samples, signal.t_start(), signal.dt())
}
