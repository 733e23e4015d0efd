//! Gaussian chirplet decomposition of real band-limited signals.
//!
//! The spectrum `H(ω) = A(ω) e^{-jψ(ω)}` of a signal is split into an even
//! amplitude and an odd phase. The amplitude is approximated by a mixture of
//! even Gaussians, selected either pointwise (matching value and curvature at
//! each extremum) or in the mean-squares sense, and refined hierarchically on
//! the residual. Attaching the local quadratic Taylor polynomial of the phase
//! to each Gaussian yields a closed-form sum of real Gaussian chirps.
//!
//! Transform convention used throughout:
//!
//! ```text
//! f(t) = ∫_{-Ω}^{Ω} e^{jωt} H(ω) dω,        H(ω) = (1/2π) ∫ e^{-jωt} f(t) dt
//! ```
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chirplet;
pub mod detrend;
pub mod error;
pub mod experiments;
pub mod extrema;
pub mod gaussian;
pub mod grid;
pub mod hierarchy;
pub mod io;
pub mod l2;
pub mod linalg;
pub mod pipeline;
pub mod pointwise;
pub mod scalar;
pub mod spectrum;

pub use chirplet::{build_model, model_spectrum, phase_offset, phase_taylor, synthesize_chirps, ChirpletModel};
pub use error::{Error, Result};
pub use extrema::{find_extrema, ExtremumKind, ExtremumPoint, OriginKind};
pub use gaussian::{inner_product, AtomKind, GaussianAtom, Order, ShapeParam, SignedMixture};
pub use grid::{FrequencyGrid, GridFunction, TimeGrid};
pub use hierarchy::{refine_until, HierarchyConfig, Method};
pub use l2::{fit_l2, L2Config};
pub use pointwise::{fit_pointwise, PointwiseConfig};
pub use scalar::Scalar;
pub use spectrum::{compute_spectrum, synthesize_standard, RealSignal, SampledSpectrum};

pub type Atom = gaussian::GaussianAtom<f64>;
pub type Mixture = gaussian::SignedMixture<f64>;
pub type Spectrum = spectrum::SampledSpectrum<f64>;
pub type Signal = spectrum::RealSignal<f64>;
pub type Grid = grid::FrequencyGrid<f64>;
pub type Amplitude = grid::GridFunction<f64>;
pub type Model = chirplet::ChirpletModel<f64>;
pub type Ledger = hierarchy::RefinementLedger<f64>;
pub type Extremum = extrema::ExtremumPoint<f64>;
