//! Closed-form space-time channel correlation under von Mises scattering.
//!
//! The channel between a moving vehicle user and a ULA base station is
//! single-cluster scattered with von Mises distributed angles of departure
//! (concentration κ_T around φ_c) and arrival (κ_R around θ_c). Temporal and
//! spatial correlation then factor:
//!
//! ```text
//! stcc(p, q, τ) = ρ(τ) · s(p, q)
//! ρ(τ)   = I0(sqrt(-a² + κ_T² + 2 a j κ_T cos(γ - φ_c))) / I0(κ_T)
//! s(p,q) = I0(sqrt(-b² + κ_R² + 2 b j κ_R cos(α - θ_c))) / I0(κ_R)
//! a = -2π τ f_c v / c,   b = 2π (p - q) d / λ_c
//! ```
//!
//! κ = 0 recovers the isotropic Jakes-Clarke forms `J0(|a|)` and `J0(|b|)`.
//! All Bessel ratios are evaluated in log-scaled form; κ_R = 131 with 100
//! antennas is routine here.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::quad::integrate_complex;
use crate::special::{hermitian_psd_eigenvalues, i0_of_sqrt};
use crate::SPEED_OF_LIGHT;

use std::f64::consts::PI;

/// Reduce an angle to [-π, π).
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let y = (x + PI).rem_euclid(two_pi) - PI;
    // rem_euclid can return exactly two_pi for inputs like -eps below a
    // multiple; fold the closed end back.
    if y >= PI {
        y - two_pi
    } else {
        y
    }
}

/// Convert an angular spread in degrees to a von Mises concentration κ = 1/σ²
/// (σ in radians).
pub fn sigma_to_kappa(sigma_deg: f64) -> Result<f64> {
    if !(sigma_deg > 0.0) {
        return Err(SimError::Domain(format!(
            "angular spread must be positive, got {sigma_deg} deg"
        )));
    }
    let sigma_rad = sigma_deg.to_radians();
    Ok(1.0 / (sigma_rad * sigma_rad))
}

/// Scattering geometry of one VUE-BS link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularProfile {
    /// AoD concentration (at the VUE), >= 0.
    pub kappa_t: f64,
    /// AoA concentration (at the BS), >= 0.
    pub kappa_r: f64,
    /// AoD central direction, [-π, π).
    pub phi_c: f64,
    /// AoA central direction, [-π, π).
    pub theta_c: f64,
    /// VUE direction of motion, [-π, π).
    pub gamma: f64,
    /// ULA orientation, [-π, π).
    pub alpha: f64,
}

impl AngularProfile {
    pub fn new(
        kappa_t: f64,
        kappa_r: f64,
        phi_c: f64,
        theta_c: f64,
        gamma: f64,
        alpha: f64,
    ) -> Result<Self> {
        if !(kappa_t >= 0.0) || !(kappa_r >= 0.0) {
            return Err(SimError::Domain(format!(
                "von Mises concentrations must be nonnegative, got κ_T={kappa_t}, κ_R={kappa_r}"
            )));
        }
        Ok(AngularProfile {
            kappa_t,
            kappa_r,
            phi_c: wrap_angle(phi_c),
            theta_c: wrap_angle(theta_c),
            gamma: wrap_angle(gamma),
            alpha: wrap_angle(alpha),
        })
    }
}

/// Uniform linear array and carrier parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrayGeometry {
    /// Antenna count.
    pub m: usize,
    /// Element spacing in meters.
    pub d: f64,
    /// Carrier frequency in Hz.
    pub f_c: f64,
}

impl ArrayGeometry {
    pub fn new(m: usize, d: f64, f_c: f64) -> Result<Self> {
        if m < 1 {
            return Err(SimError::Domain("antenna count must be >= 1".into()));
        }
        if !(d > 0.0) || !(f_c > 0.0) {
            return Err(SimError::Domain(format!(
                "element spacing and carrier frequency must be positive, got d={d}, f_c={f_c}"
            )));
        }
        Ok(ArrayGeometry { m, d, f_c })
    }

    /// Carrier wavelength λ_c = c / f_c.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.f_c
    }
}

/// Temporal phase argument `a = -2π τ f_c v / c`.
pub fn doppler_arg(tau: f64, f_c: f64, v: f64) -> f64 {
    -2.0 * PI * tau * f_c * v / SPEED_OF_LIGHT
}

/// Spatial phase argument `b = 2π (p - q) d / λ_c` for 1-based element indices.
pub fn spatial_arg(p: usize, q: usize, array: &ArrayGeometry) -> f64 {
    2.0 * PI * (p as f64 - q as f64) * array.d / array.wavelength()
}

/// `I0(κ²)` in scaled form, with a one-entry thread-local memo: correlation
/// sweeps evaluate millions of ratios against the same concentration.
fn i0_of_kappa_sq(kappa: f64) -> crate::special::ScaledBessel {
    use std::cell::Cell;
    thread_local! {
        static LAST: Cell<Option<(u64, crate::special::ScaledBessel)>> = const { Cell::new(None) };
    }
    LAST.with(|cell| {
        if let Some((bits, value)) = cell.get() {
            if bits == kappa.to_bits() {
                return value;
            }
        }
        let value = i0_of_sqrt(Complex64::new(kappa * kappa, 0.0));
        cell.set(Some((kappa.to_bits(), value)));
        value
    })
}

/// The common von Mises correlation kernel `I0(sqrt(κ² - x² + 2 x j κ c)) / I0(κ)`.
fn von_mises_ratio(x: f64, kappa: f64, rel_cos: f64) -> Complex64 {
    let w = Complex64::new(kappa * kappa - x * x, 2.0 * x * kappa * rel_cos);
    i0_of_sqrt(w).ratio(&i0_of_kappa_sq(kappa))
}

/// Temporal autocorrelation ρ(τ) of any channel entry.
pub fn acf(profile: &AngularProfile, v: f64, array: &ArrayGeometry, tau: f64) -> Complex64 {
    let a = doppler_arg(tau, array.f_c, v);
    von_mises_ratio(a, profile.kappa_t, (profile.gamma - profile.phi_c).cos())
}

/// Spatial correlation s(p, q) between array elements p and q (1-based).
pub fn scf(profile: &AngularProfile, array: &ArrayGeometry, p: usize, q: usize) -> Result<Complex64> {
    if p < 1 || p > array.m || q < 1 || q > array.m {
        return Err(SimError::Index(format!(
            "element indices must lie in 1..={}, got p={p}, q={q}",
            array.m
        )));
    }
    let b = spatial_arg(p, q, array);
    Ok(von_mises_ratio(
        b,
        profile.kappa_r,
        (profile.alpha - profile.theta_c).cos(),
    ))
}

/// One space-time cross-correlation entry, the separable product ρ(τ)·s(p,q).
pub fn stcc_element(
    profile: &AngularProfile,
    v: f64,
    array: &ArrayGeometry,
    p: usize,
    q: usize,
    tau: f64,
) -> Result<Complex64> {
    Ok(acf(profile, v, array, tau) * scf(profile, array, p, q)?)
}

/// M×M spatial correlation matrix with unit diagonal, Hermitian and PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialMatrix {
    mat: DMatrix<Complex64>,
}

impl SpatialMatrix {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

/// Build the spatial correlation matrix R0 with entries s(p, q).
///
/// The ULA geometry makes the matrix Toeplitz, so only the first column of
/// correlations is evaluated. Positive semidefiniteness is verified within
/// the standard eigenvalue clipping band.
pub fn spatial_matrix(profile: &AngularProfile, array: &ArrayGeometry) -> Result<SpatialMatrix> {
    let r0 = spatial_matrix_unvalidated(profile, array)?;
    hermitian_psd_eigenvalues(r0.matrix())?;
    Ok(r0)
}

/// Toeplitz assembly without the eigenvalue check, for callers that factor
/// the matrix right away (the factorization applies the same PSD policy).
pub(crate) fn spatial_matrix_unvalidated(
    profile: &AngularProfile,
    array: &ArrayGeometry,
) -> Result<SpatialMatrix> {
    let m = array.m;
    let mut offsets = Vec::with_capacity(m);
    for k in 0..m {
        offsets.push(scf(profile, array, k + 1, 1)?);
    }
    let mat = DMatrix::from_fn(m, m, |p, q| {
        if p >= q {
            offsets[p - q]
        } else {
            offsets[q - p].conj()
        }
    });
    Ok(SpatialMatrix { mat })
}

/// Spatial correlation entry of the comparison model from preliminary work:
/// uniform AoA on [θ_c - σ_R, θ_c + σ_R] with a fixed broadside convention,
/// `(1 / 2σ_R) ∫ exp(j b sin θ) dθ`. σ_R is in radians. No closed form;
/// evaluated by adaptive quadrature to 1e-8 absolute.
pub fn legacy_scf(
    theta_c: f64,
    sigma_r: f64,
    array: &ArrayGeometry,
    p: usize,
    q: usize,
) -> Result<Complex64> {
    if !(sigma_r > 0.0) {
        return Err(SimError::Domain(format!(
            "uniform AoA half-range must be positive, got {sigma_r} rad"
        )));
    }
    if p < 1 || p > array.m || q < 1 || q > array.m {
        return Err(SimError::Index(format!(
            "element indices must lie in 1..={}, got p={p}, q={q}",
            array.m
        )));
    }
    let b = spatial_arg(p, q, array);
    let integral = integrate_complex(
        |theta| Complex64::new(0.0, b * theta.sin()).exp(),
        theta_c - sigma_r,
        theta_c + sigma_r,
        2.0 * sigma_r * 1e-9,
    );
    Ok(integral / (2.0 * sigma_r))
}

/// Temporal autocorrelation of the comparison model: same von Mises closed
/// form but with the motion direction fixed at γ = 0.
pub fn legacy_acf(kappa_t: f64, phi_c: f64, v: f64, array: &ArrayGeometry, tau: f64) -> Complex64 {
    let a = doppler_arg(tau, array.f_c, v);
    von_mises_ratio(a, kappa_t, phi_c.cos())
}
