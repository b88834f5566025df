//! Desk-scale simulator for channel aging in massive MIMO vehicular uplinks.
//!
//! The library models the narrow-band channel between vehicle users and base
//! stations with uniform linear arrays under non-isotropic (von Mises)
//! scattering, and evaluates uplink spectral efficiency under MR and MMSE
//! combining with pilot contamination and channel aging. On top of the link
//! model it provides freeway and urban Manhattan network scenarios, a
//! Monte Carlo area-spectral-efficiency (ASE) sweep over the transmission
//! block size, and a regression pipeline that fits empirical models for the
//! ASE-optimal block size.
//!
//! Module map:
//! - [`special`]: overflow-safe `I0(sqrt(w))`, `J0`, Hermitian PSD square roots
//! - [`correlation`]: closed-form ACF/SCF/STCC and spatial correlation matrices
//! - [`channel`]: large-scale gain, initial channel draws, discrete aging
//! - [`training`]: pilot assignment, MMSE estimation, NMSE analysis
//! - [`receiver`]: MR/MMSE combining, SINR, per-block SE, ASE
//! - [`scenarios`]: freeway / Manhattan layouts, VUE drops, wraparound
//! - [`sweep`]: ASE-vs-C curves, optimal block size, empirical model fits
//! - [`config`]: run configuration, defaults, noise power, content hashing

pub mod channel;
pub mod config;
pub mod correlation;
pub mod error;
pub mod quad;
pub mod receiver;
pub mod scenarios;
pub mod seed;
pub mod special;
pub mod sweep;
pub mod training;

pub use error::{Result, SimError};

/// Propagation speed used throughout (m/s). The carrier wavelength
/// convention follows `λ = c / f_c` with `c = 3.0e8`, which makes a 2 GHz
/// carrier come out at exactly 0.15 m.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;
