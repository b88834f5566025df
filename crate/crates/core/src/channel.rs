//! Large-scale gain and the discrete aging channel per VUE-BS link.
//!
//! The channel at symbol n evolves from its training-phase state as
//! `h[n] = ρ[n] h[0] + sqrt(1 - |ρ[n]|²) z[n]` with an independent innovation
//! `z[n]` of the same distribution, so the covariance `G · R0` is stationary
//! while the correlation to `h[0]` decays along the ACF.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::correlation::{acf, AngularProfile, ArrayGeometry, SpatialMatrix};
use crate::error::{Result, SimError};
use crate::special::hermitian_psd_sqrt;

/// Large-scale channel gain of one link: `gain_db = -34.53 - 38 log10(D) + X`
/// with 3D distance `D` in meters and lognormal shadow term `X` in dB.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LargeScale {
    pub distance: f64,
    pub shadow_db: f64,
    pub gain_db: f64,
    pub gain_linear: f64,
}

/// Evaluate the path-loss model for a link.
pub fn path_gain(distance: f64, shadow_db: f64) -> Result<LargeScale> {
    if !(distance > 0.0) {
        return Err(SimError::Domain(format!(
            "distance must be positive, got {distance} m"
        )));
    }
    let gain_db = -34.53 - 38.0 * distance.log10() + shadow_db;
    Ok(LargeScale {
        distance,
        shadow_db,
        gain_db,
        gain_linear: 10f64.powf(gain_db / 10.0),
    })
}

/// Aging coefficients ρ[n] = ρ(n·Ts) for n = 0..C-1. ρ[0] is exactly 1.
pub fn rho_sequence(
    profile: &AngularProfile,
    v: f64,
    array: &ArrayGeometry,
    ts: f64,
    c_symbols: usize,
) -> Vec<Complex64> {
    (0..c_symbols)
        .map(|n| acf(profile, v, array, n as f64 * ts))
        .collect()
}

/// Draw an M-vector of i.i.d. circularly symmetric unit-variance complex
/// Gaussians (real and imaginary parts N(0, 1/2) each).
pub fn complex_gaussian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Static state of one VUE-BS link: large-scale gain, spatial correlation,
/// the cached square root of `G · R0`, and the scattering profile. Channel
/// realizations (`h[0]`, innovations) are drawn on demand so the link itself
/// stays immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct LinkState {
    pub large_scale: LargeScale,
    pub r0: SpatialMatrix,
    pub profile: AngularProfile,
    sqrt_g_r0: DMatrix<Complex64>,
}

impl LinkState {
    pub fn new(large_scale: LargeScale, r0: SpatialMatrix, profile: AngularProfile) -> Result<Self> {
        let sqrt_r0 = hermitian_psd_sqrt(r0.matrix())?;
        let scale = Complex64::new(large_scale.gain_linear.sqrt(), 0.0);
        Ok(LinkState {
            large_scale,
            r0,
            profile,
            sqrt_g_r0: sqrt_r0 * scale,
        })
    }

    /// `(G · R0)^{1/2}`, used to color white draws.
    pub fn sqrt_g_r0(&self) -> &DMatrix<Complex64> {
        &self.sqrt_g_r0
    }

    /// `G · R0`, the per-link channel covariance.
    pub fn g_r0(&self) -> DMatrix<Complex64> {
        self.r0.matrix() * Complex64::new(self.large_scale.gain_linear, 0.0)
    }

    /// Draw the training-phase channel `h[0] = (G R0)^{1/2} w`, `w ~ CN(0, I)`.
    pub fn draw_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<Complex64> {
        &self.sqrt_g_r0 * complex_gaussian(self.r0.dim(), rng)
    }
}

/// Advance the channel to symbol n: `ρ h[0] + sqrt(1 - |ρ|²) z`.
///
/// `z` must be drawn with the same covariance as `h0`.
pub fn age(
    h0: &DVector<Complex64>,
    rho_n: Complex64,
    z_n: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let mag_sq = rho_n.norm_sqr();
    if mag_sq > 1.0 + 1e-12 {
        return Err(SimError::Domain(format!(
            "aging coefficient magnitude must not exceed 1, got |ρ| = {}",
            mag_sq.sqrt()
        )));
    }
    let bar = (1.0 - mag_sq).max(0.0).sqrt();
    Ok(h0 * rho_n + z_n * Complex64::new(bar, 0.0))
}
