//! Overflow-safe special functions behind the correlation closed forms.
//!
//! The space-time correlation model needs `I0(sqrt(w))` for complex `w` whose
//! magnitude reaches ~1e5 (antenna separations up to 99 half-wavelengths) and
//! real arguments up to κ ≈ 131, where `I0` overflows f64 range. Values are
//! therefore carried as `mantissa · exp(log_scale)` and correlation ratios are
//! formed by subtracting log scales instead of materializing huge numbers.
//!
//! `I0(sqrt(w))` depends on `w` only through even powers of `sqrt(w)`, so it
//! is entire in `w` and branch-free. Two evaluation paths are used:
//!
//! - power series `Σ (w/4)^k / (k!)²` for `|w| ≤ W_SWITCH`, accumulated in
//!   double-double arithmetic: near the negative real axis the series
//!   alternates and cancels down to ~e^{-|z|} of its largest term, which
//!   plain f64 cannot survive at |z| ≈ 20;
//! - the compound asymptotic expansion of `I0(z)`, `z` the principal square
//!   root, for `|w| > W_SWITCH`, with the subdominant `e^{-z}` branch kept so
//!   the expansion stays uniformly valid up to the imaginary axis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Series/asymptotic crossover in `|w|`; the series handles `|sqrt(w)| ≤ 20`.
pub const W_SWITCH: f64 = 400.0;

/// A complex value stored as `mantissa * exp(log_scale)`.
///
/// When the value is nonzero the mantissa magnitude is kept in [1e-2, 1e2].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledBessel {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledBessel {
    /// Collapse to a plain complex number. Overflows to infinity if the
    /// scale exceeds f64 range; callers combining large values should use
    /// [`ScaledBessel::ratio`] instead.
    pub fn value(&self) -> Complex64 {
        self.mantissa * Complex64::new(self.log_scale.exp(), 0.0)
    }

    /// `self / denom` computed in log-scaled form.
    pub fn ratio(&self, denom: &ScaledBessel) -> Complex64 {
        (self.mantissa / denom.mantissa) * (self.log_scale - denom.log_scale).exp()
    }

    fn normalized(mantissa: Complex64, log_scale: f64) -> Self {
        let mag = mantissa.norm();
        if mag == 0.0 {
            return ScaledBessel {
                mantissa: Complex64::ZERO,
                log_scale: 0.0,
            };
        }
        if (1e-2..=1e2).contains(&mag) {
            ScaledBessel {
                mantissa,
                log_scale,
            }
        } else {
            let shift = mag.ln();
            ScaledBessel {
                mantissa: mantissa * (-shift).exp(),
                log_scale: log_scale + shift,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Double-double arithmetic (error-free transformations)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    // Requires |a| >= |b|.
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        quick_two_sum(s.hi, lo)
    }

    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self.add(Dd {
            hi: -o.hi,
            lo: -o.lo,
        })
    }

    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        let lo = p.lo + self.hi * o.lo + self.lo * o.hi;
        quick_two_sum(p.hi, lo)
    }

    #[inline]
    fn div_f64(self, d: f64) -> Dd {
        let q0 = self.hi / d;
        let t = two_prod(q0, d);
        let s = two_sum(self.hi, -t.hi);
        let q1 = (s.hi + (s.lo + self.lo - t.lo)) / d;
        quick_two_sum(q0, q1)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy, Debug)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    const ONE: CDd = CDd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd::ZERO,
    };

    #[inline]
    fn from_c64(z: Complex64) -> CDd {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    #[inline]
    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    #[inline]
    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    #[inline]
    fn div_f64(self, d: f64) -> CDd {
        CDd {
            re: self.re.div_f64(d),
            im: self.im.div_f64(d),
        }
    }

    #[inline]
    fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    #[inline]
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

// ---------------------------------------------------------------------------
// I0(sqrt(w))
// ---------------------------------------------------------------------------

const SERIES_MAX_TERMS: usize = 400;
const SERIES_REL_CUTOFF: f64 = 1e-18;

fn i0_sqrt_series(w: Complex64) -> ScaledBessel {
    // Σ_k (w/4)^k / (k!)², term recurrence t_{k+1} = t_k · (w/4) / (k+1)².
    let w4 = CDd::from_c64(w * 0.25);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    for k in 1..=SERIES_MAX_TERMS {
        term = term.mul(w4).div_f64((k * k) as f64);
        sum = sum.add(term);
        if term.norm_hi() <= SERIES_REL_CUTOFF * sum.norm_hi() {
            break;
        }
    }
    ScaledBessel::normalized(sum.to_c64(), 0.0)
}

const ASYMPTOTIC_MAX_TERMS: usize = 60;

fn i0_sqrt_asymptotic(w: Complex64) -> ScaledBessel {
    // Principal root keeps Re z >= 0, so exp(z) carries the growth and the
    // reflected exp(-z) branch is bounded. Keeping both makes the expansion
    // valid on the whole annulus including arguments near the imaginary axis,
    // where I0(jy) = J0(y) oscillates.
    let z = w.sqrt();
    let zinv = 1.0 / z;

    // u_{k+1} = u_k (2k+1)² / (8(k+1)); sum_plus = Σ u_k z^{-k},
    // sum_minus = Σ (-1)^k u_k z^{-k}. Truncate at the smallest term.
    let mut sum_plus = Complex64::new(1.0, 0.0);
    let mut sum_minus = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev_mag = f64::INFINITY;
    let mut sign = 1.0;
    for k in 0..ASYMPTOTIC_MAX_TERMS {
        let kf = k as f64;
        let factor = (2.0 * kf + 1.0).powi(2) / (8.0 * (kf + 1.0));
        term *= zinv * factor;
        let mag = term.norm();
        if mag >= prev_mag {
            break; // divergence onset: optimal truncation reached
        }
        prev_mag = mag;
        sign = -sign;
        sum_plus += term;
        sum_minus += sign * term;
        if mag <= 1e-18 * sum_plus.norm() {
            break;
        }
    }

    let sigma = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, z.im).exp(); // e^{j Im z}
    // e^{-z} relative to the e^{Re z} scale: magnitude e^{-2 Re z} <= 1.
    let reflected = Complex64::new(-2.0 * z.re, -z.im).exp();
    let bracket = phase * sum_plus + Complex64::new(0.0, sigma) * reflected * sum_minus;
    let denom = (2.0 * std::f64::consts::PI * z).sqrt();
    ScaledBessel::normalized(bracket / denom, z.re)
}

/// Evaluate `I0(sqrt(w))` for finite complex `w`, in scaled form.
///
/// Since `I0` is even, the result depends on `w` alone (no branch choice).
pub fn i0_of_sqrt(w: Complex64) -> ScaledBessel {
    // Canonicalize -0.0 imaginary parts so conjugate symmetry is exact on the
    // real axis.
    let w = Complex64::new(w.re, if w.im == 0.0 { 0.0 } else { w.im });
    if w.norm() <= W_SWITCH {
        i0_sqrt_series(w)
    } else {
        i0_sqrt_asymptotic(w)
    }
}

/// Bessel function of the first kind, order zero, via `I0(j x) = J0(x)`.
pub fn j0(x: f64) -> f64 {
    i0_of_sqrt(Complex64::new(-x * x, 0.0)).value().re
}

// ---------------------------------------------------------------------------
// Hermitian PSD matrix square root
// ---------------------------------------------------------------------------

/// Maximum allowed off-Hermitian deviation in the input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue clipping factor: eigenvalues in [-ε, 0) with
/// ε = `PSD_CLIP_REL` · λ_max are treated as exact zeros.
pub const PSD_CLIP_REL: f64 = 1e-12;

/// Hermitian square root `S` of a PSD matrix `R`, with `S Sᴴ = R`.
///
/// Slightly negative eigenvalues within the clip band are zeroed; anything
/// below the band reports `NotPsd`.
pub fn hermitian_psd_sqrt(r: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = r.nrows();
    if r.ncols() != n {
        return Err(SimError::Domain(format!(
            "matrix square root needs a square matrix, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            max_dev = max_dev.max((r[(i, j)] - r[(j, i)].conj()).norm());
        }
    }
    if max_dev > HERMITIAN_TOL {
        return Err(SimError::Domain(format!(
            "matrix is not Hermitian: max deviation {max_dev:e}"
        )));
    }

    let eig = r.clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let clip = PSD_CLIP_REL * lambda_max;
    let mut sqrt_vals = Vec::with_capacity(n);
    for &lam in eig.eigenvalues.iter() {
        if lam < -clip {
            return Err(SimError::NotPsd {
                min_eigenvalue: lam,
                threshold: clip,
            });
        }
        sqrt_vals.push(lam.max(0.0).sqrt());
    }

    // S = U diag(sqrt λ) Uᴴ
    let u = eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, &s) in sqrt_vals.iter().enumerate() {
        scaled
            .column_mut(j)
            .iter_mut()
            .for_each(|e| *e *= Complex64::new(s, 0.0));
    }
    Ok(&scaled * u.adjoint())
}

/// Eigenvalues of a Hermitian matrix, clipped to be nonnegative within the
/// standard band; errors if any eigenvalue falls below it.
pub fn hermitian_psd_eigenvalues(r: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let eig = r.clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let clip = PSD_CLIP_REL * lambda_max;
    let mut vals = Vec::with_capacity(eig.eigenvalues.len());
    for &lam in eig.eigenvalues.iter() {
        if lam < -clip {
            return Err(SimError::NotPsd {
                min_eigenvalue: lam,
                threshold: clip,
            });
        }
        vals.push(lam.max(0.0));
    }
    Ok(vals)
}
