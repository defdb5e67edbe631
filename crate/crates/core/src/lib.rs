//! Polynomial wavelets on the n-sphere.
//!
//! A zonal wavelet family whose members are polynomials at every scale and
//! whose inverse transform, truncated to the scale window [R, 1/R],
//! multiplies degree l by (1−R)^l up to degree floor(1/R). Everything is
//! computed spectrally: signals are per-degree coefficient blocks and the
//! scale integrals are evaluated in closed form.
//!
//! - [`harmonics`]: N(n,l), Gegenbauer polynomials, Gauss–Gegenbauer rules.
//! - [`wavelet_family`]: the scale profiles γ_l, their tails, and Ψ_ρ.
//! - [`transform`]: analysis, synthesis, L² residual, isometry defect.
//! - [`signals`]: zonal test profiles and sup-norm error measurement.
//! - [`cli`]: the CSV-emitting commands behind the `sphwavelet` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod harmonics;
pub mod quad;
pub mod signals;
pub mod transform;
pub mod wavelet_family;

pub use error::{Error, Result};
pub use harmonics::{QuadratureRule, SphereParams};
pub use signals::{Provenance, ZonalProfile};
pub use transform::{ScaleWindow, SpectralSignal};
pub use wavelet_family::{KernelMode, WaveletSymbol};
