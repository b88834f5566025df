//! Shared test oracles, independent of the library's evaluation paths.
//!
//! The quadrature oracle integrates the defining integrals of the
//! correlation model directly (composite trapezoid over a full period,
//! spectrally accurate for smooth periodic integrands) and self-checks by
//! doubling the resolution.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Composite trapezoid over one period [-π, π); for smooth 2π-periodic
/// integrands this converges spectrally.
pub fn trapezoid_periodic<F: Fn(f64) -> Complex64>(f: &F, n: usize) -> Complex64 {
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::ZERO;
    for k in 0..n {
        acc += f(-PI + k as f64 * h);
    }
    acc * h
}

/// Periodic quadrature with a doubling self-check: 2^14 points, and 2^15
/// must move the result by less than 1e-10 relative (the integrands here
/// reach e^κ, so the check is scaled to the result magnitude).
pub fn checked_periodic<F: Fn(f64) -> Complex64>(f: &F) -> Complex64 {
    let coarse = trapezoid_periodic(f, 1 << 14);
    let fine = trapezoid_periodic(f, 1 << 15);
    let scale = fine.norm().max(1.0);
    assert!(
        (coarse - fine).norm() < 1e-10 * scale,
        "quadrature oracle not converged: relative delta {}",
        (coarse - fine).norm() / scale
    );
    fine
}

/// Oracle for the von Mises characteristic factor
/// `∫ exp(j x cos(ω - motion)) p(ω) dω` with
/// `p(ω) = exp(κ cos(ω - center)) / (2π I0(κ))`; both the numerator and the
/// normalization are evaluated by quadrature.
pub fn von_mises_char_oracle(x: f64, kappa: f64, motion: f64, center: f64) -> Complex64 {
    let numerator = checked_periodic(&|w: f64| {
        (Complex64::new(0.0, x * (w - motion).cos()) + kappa * (w - center).cos()).exp()
    });
    let normalization = checked_periodic(&|w: f64| Complex64::new((kappa * w.cos()).exp(), 0.0));
    numerator / normalization
}

/// J0 oracle: `(1/2π) ∫ exp(-j x sin t) dt`.
pub fn j0_oracle(x: f64) -> f64 {
    (checked_periodic(&|t: f64| Complex64::new(0.0, -x * t.sin()).exp()) / (2.0 * PI)).re
}

/// I0 oracle on the real axis: `(1/2π) ∫ exp(κ cos t) dt`.
pub fn i0_oracle(kappa: f64) -> f64 {
    (checked_periodic(&|t: f64| Complex64::new((kappa * t.cos()).exp(), 0.0)) / (2.0 * PI)).re
}

/// Draw one von Mises(center, κ) sample (Best-Fisher rejection).
pub fn sample_von_mises<R: rand::Rng + ?Sized>(center: f64, kappa: f64, rng: &mut R) -> f64 {
    if kappa < 1e-9 {
        return rng.random_range(-PI..PI);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random();
            let theta = if u3 > 0.5 { f.acos() } else { -f.acos() };
            return center + theta;
        }
    }
}
