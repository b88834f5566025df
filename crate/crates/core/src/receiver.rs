//! Receive combining, effective SINR, and per-block spectral efficiency.
//!
//! The SINR of user k at data symbol n is formed from channel estimates and
//! the statistical covariance of the accumulative error, never from realized
//! data symbols:
//!
//! ```text
//! η_k[n] = P_k |ρ_k[n]|² |vᴴ ĥ_k|²
//!          ---------------------------------------------------------
//!          Σ_{k'≠k} P_{k'} |ρ_{k'}[n]|² |vᴴ ĥ_{k'}|² + vᴴ E[n] v
//!
//! E[n] = Σ_{k'} P_{k'} (G_{k'} R0_{k'} - |ρ_{k'}[n]|² Φ_{k'}) + σ_n² I
//! ```
//!
//! MR combining uses v = ĥ_k; MMSE combining maximizes the generalized
//! Rayleigh quotient above. Per-block SE averages log2(1 + η) over the data
//! symbols, optionally decimated by a stride with nearest-sample fill.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Receive combining strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    Mr,
    Mmse,
}

impl std::fmt::Display for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Combiner::Mr => write!(f, "mr"),
            Combiner::Mmse => write!(f, "mmse"),
        }
    }
}

/// Everything the SINR of one data symbol depends on, for one BS.
#[derive(Clone, Debug)]
pub struct SymbolContext<'a> {
    /// Symbol index within the data phase (1-based).
    pub n: usize,
    /// Aging coefficient ρ_{k'}[n] per user, as seen by this BS.
    pub rho: Vec<Complex64>,
    /// Transmit powers per user.
    pub powers: &'a [f64],
    /// Channel estimates ĥ_{k'}[0] per user at this BS.
    pub h_hat: &'a [DVector<Complex64>],
    /// Interference-plus-error covariance E[n].
    pub e_matrix: DMatrix<Complex64>,
}

/// Assemble `E[n] = Σ P_{k'} (G R0 - |ρ_{k'}[n]|² Φ_{k'}) + σ_n² I`.
pub fn assemble_e(
    powers: &[f64],
    g_r0: &[DMatrix<Complex64>],
    phi: &[DMatrix<Complex64>],
    rho_abs_sq: &[f64],
    sigma_n2: f64,
) -> DMatrix<Complex64> {
    let m = g_r0[0].nrows();
    let mut e = DMatrix::<Complex64>::identity(m, m) * Complex64::new(sigma_n2, 0.0);
    for k in 0..powers.len() {
        e += &g_r0[k] * Complex64::new(powers[k], 0.0);
        e -= &phi[k] * Complex64::new(powers[k] * rho_abs_sq[k], 0.0);
    }
    e
}

/// MR combining vector: the channel estimate itself (SINR is scale
/// invariant, so no normalization).
pub fn mr_combiner(h_hat: &DVector<Complex64>) -> DVector<Complex64> {
    h_hat.clone()
}

/// SINR-maximizing MMSE combining vector
/// `v = P_k (Σ P_{k'} |ρ_{k'}[n]|² ĥ_{k'} ĥ_{k'}ᴴ + E)⁻¹ ĥ_k`.
///
/// The σ_n² I inside E makes the system matrix positive definite, so the
/// pseudoinverse of the defining expression is an ordinary inverse.
pub fn mmse_combiner(k: usize, ctx: &SymbolContext) -> Result<DVector<Complex64>> {
    let mut b = ctx.e_matrix.clone();
    for k2 in 0..ctx.powers.len() {
        let w = ctx.powers[k2] * ctx.rho[k2].norm_sqr();
        if w != 0.0 {
            b += &ctx.h_hat[k2] * ctx.h_hat[k2].adjoint() * Complex64::new(w, 0.0);
        }
    }
    let chol = Cholesky::new(b).ok_or_else(|| {
        SimError::SolveFailure("MMSE combining system matrix is not positive definite".into())
    })?;
    Ok(chol.solve(&ctx.h_hat[k]) * Complex64::new(ctx.powers[k], 0.0))
}

/// Instantaneous effective SINR of user k under combining vector `v`.
pub fn sinr(k: usize, v: &DVector<Complex64>, ctx: &SymbolContext) -> Result<f64> {
    if v.iter().all(|z| *z == Complex64::ZERO) {
        return Err(SimError::ZeroVector);
    }
    let mut desired = 0.0;
    let mut interference = 0.0;
    for k2 in 0..ctx.powers.len() {
        let proj = v.dotc(&ctx.h_hat[k2]).norm_sqr();
        let term = ctx.powers[k2] * ctx.rho[k2].norm_sqr() * proj;
        if k2 == k {
            desired = term;
        } else {
            interference += term;
        }
    }
    let quad = v.dotc(&(&ctx.e_matrix * v)).re;
    Ok(desired / (interference + quad))
}

/// Per-block spectral efficiency of one user.
#[derive(Clone, Debug)]
pub struct SeResult {
    /// SE at every data symbol 1..=C-T (filled between evaluated strides).
    pub per_symbol_se: Vec<f64>,
    /// Block average: (1/C) Σ per-symbol SE.
    pub block_se: f64,
    /// SINR at the evaluated symbol indices.
    pub sinr_trace: Vec<f64>,
}

/// Data-symbol indices evaluated under a stride: 1, 1+s, ... ≤ C-T.
pub(crate) fn sampled_indices(c_data: usize, stride: usize) -> Vec<usize> {
    (1..=c_data).step_by(stride).collect()
}

/// Number of data symbols that map to each evaluated index under
/// nearest-sample fill (ties resolved toward the earlier sample).
pub(crate) fn nearest_fill_weights(sampled: &[usize], c_data: usize) -> Vec<usize> {
    let mut weights = Vec::with_capacity(sampled.len());
    let mut lo_cut = 0usize;
    for i in 0..sampled.len() {
        let hi_cut = if i + 1 < sampled.len() {
            (sampled[i] + sampled[i + 1]) / 2
        } else {
            c_data
        };
        weights.push(hi_cut - lo_cut);
        lo_cut = hi_cut;
    }
    weights
}

/// Statistics of one channel realization at one BS, indexed over all K users
/// in the network: enough to evaluate any symbol of the block.
#[derive(Clone, Debug)]
pub struct RealizationContext {
    pub powers: Vec<f64>,
    pub h_hat: Vec<DVector<Complex64>>,
    pub g_r0: Vec<DMatrix<Complex64>>,
    pub phi: Vec<DMatrix<Complex64>>,
    /// ρ_{k'}[n] for n = 0.., at least up to the largest data symbol used.
    pub rho: Vec<Vec<Complex64>>,
    pub sigma_n2: f64,
}

impl RealizationContext {
    /// Build the symbol context for data symbol n (1-based).
    pub fn symbol_context(&self, n: usize) -> SymbolContext<'_> {
        let rho: Vec<Complex64> = self.rho.iter().map(|r| r[n]).collect();
        let rho_abs_sq: Vec<f64> = rho.iter().map(|r| r.norm_sqr()).collect();
        let e_matrix = assemble_e(&self.powers, &self.g_r0, &self.phi, &rho_abs_sq, self.sigma_n2);
        SymbolContext {
            n,
            rho,
            powers: &self.powers,
            h_hat: &self.h_hat,
            e_matrix,
        }
    }
}

/// Average achievable SE of user k over one transmission block of C symbols
/// with T pilot symbols, evaluating the SINR every `stride` data symbols and
/// filling the rest from the nearest evaluated symbol. Stride 1 evaluates
/// every data symbol exactly.
pub fn block_se(
    ctx: &RealizationContext,
    k: usize,
    combiner: Combiner,
    c: usize,
    t: usize,
    stride: usize,
) -> Result<SeResult> {
    if t < 1 || c <= t {
        return Err(SimError::Config(format!(
            "block must satisfy C > T >= 1, got C={c}, T={t}"
        )));
    }
    if stride < 1 {
        return Err(SimError::Config("stride must be >= 1".into()));
    }
    let c_data = c - t;
    let sampled = sampled_indices(c_data, stride);
    let mut sinr_trace = Vec::with_capacity(sampled.len());
    let mut se_samples = Vec::with_capacity(sampled.len());
    for &n in &sampled {
        let sym = ctx.symbol_context(n);
        let v = match combiner {
            Combiner::Mr => mr_combiner(&sym.h_hat[k]),
            Combiner::Mmse => mmse_combiner(k, &sym)?,
        };
        let eta = sinr(k, &v, &sym)?;
        sinr_trace.push(eta);
        se_samples.push((1.0 + eta).log2());
    }
    let weights = nearest_fill_weights(&sampled, c_data);
    let mut per_symbol_se = vec![0.0; c_data];
    let mut cursor = 0usize;
    for (i, &w) in weights.iter().enumerate() {
        for slot in per_symbol_se.iter_mut().skip(cursor).take(w) {
            *slot = se_samples[i];
        }
        cursor += w;
    }
    let block_se = per_symbol_se.iter().sum::<f64>() / c as f64;
    Ok(SeResult {
        per_symbol_se,
        block_se,
        sinr_trace,
    })
}

/// Area spectral efficiency: the per-cell sum of user SEs.
pub fn ase(se_per_user: &[f64], l_cells: usize) -> f64 {
    assert!(l_cells >= 1, "ASE needs at least one cell");
    se_per_user.iter().sum::<f64>() / l_cells as f64
}
