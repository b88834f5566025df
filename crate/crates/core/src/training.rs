//! Pilot training and MMSE channel estimation under pilot contamination.
//!
//! Pilots are assigned uniformly at random, so with more users than pilots
//! several users share a sequence and their processed pilot observations
//! superpose. Estimation always goes through the physically received pilot
//! signal rather than sampling estimates from their marginal distribution:
//! pilot-sharing users' estimates are correlated through the shared
//! observation, and simulating the reception captures that for free.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::complex_gaussian;
use crate::error::{Result, SimError};

/// Random many-to-one map from users to pilot sequences.
#[derive(Clone, Debug)]
pub struct PilotAssignment {
    pilot_of: Vec<usize>,
    cohorts: Vec<Vec<usize>>,
}

impl PilotAssignment {
    /// Pilot index (0-based) assigned to user k.
    pub fn pilot_of(&self, k: usize) -> usize {
        self.pilot_of[k]
    }

    /// Users sharing pilot t.
    pub fn cohort(&self, t: usize) -> &[usize] {
        &self.cohorts[t]
    }

    pub fn n_pilots(&self) -> usize {
        self.cohorts.len()
    }

    pub fn n_users(&self) -> usize {
        self.pilot_of.len()
    }
}

/// Assign each of `k_users` a pilot drawn independently and uniformly from
/// `t_pilots` sequences. Collisions are possible (and expected) even when
/// `t_pilots >= k_users`.
pub fn assign_pilots<R: Rng + ?Sized>(
    k_users: usize,
    t_pilots: usize,
    rng: &mut R,
) -> Result<PilotAssignment> {
    if k_users < 1 || t_pilots < 1 {
        return Err(SimError::Domain(format!(
            "need at least one user and one pilot, got K={k_users}, T={t_pilots}"
        )));
    }
    let mut pilot_of = Vec::with_capacity(k_users);
    let mut cohorts = vec![Vec::new(); t_pilots];
    for k in 0..k_users {
        let t = rng.random_range(0..t_pilots);
        pilot_of.push(t);
        cohorts[t].push(k);
    }
    Ok(PilotAssignment { pilot_of, cohorts })
}

/// Processed received pilot signal for one pilot sequence at one BS:
/// `y = Σ_cohort sqrt(P T) h[0] + n`, `n ~ CN(0, σ_n² I)`.
pub fn receive_pilot<'a, R: Rng + ?Sized>(
    contributions: impl IntoIterator<Item = (f64, &'a DVector<Complex64>)>,
    t_len: usize,
    sigma_n2: f64,
    m: usize,
    rng: &mut R,
) -> DVector<Complex64> {
    let mut y = DVector::<Complex64>::zeros(m);
    for (power, h0) in contributions {
        y += h0 * Complex64::new((power * t_len as f64).sqrt(), 0.0);
    }
    if sigma_n2 > 0.0 {
        y += complex_gaussian(m, rng) * Complex64::new(sigma_n2.sqrt(), 0.0);
    }
    y
}

/// Covariance of the processed pilot observation for a cohort:
/// `Ψ = Σ_cohort P T G R0 + σ_n² I`.
pub fn build_psi(
    cohort: &[(f64, &DMatrix<Complex64>)],
    t_len: usize,
    sigma_n2: f64,
    m: usize,
) -> DMatrix<Complex64> {
    let mut psi = DMatrix::<Complex64>::identity(m, m) * Complex64::new(sigma_n2, 0.0);
    for (power, g_r0) in cohort {
        psi += *g_r0 * Complex64::new(power * t_len as f64, 0.0);
    }
    psi
}

/// MMSE estimate of one user's training-phase channel, with its second-order
/// statistics.
#[derive(Clone, Debug)]
pub struct Estimate {
    /// The estimate itself.
    pub h_hat: DVector<Complex64>,
    /// Covariance of the estimate, `Φ = P T (G R0) Ψ⁻¹ (G R0)`.
    pub phi: DMatrix<Complex64>,
    /// Covariance of the pilot observation the estimate came from.
    pub psi: DMatrix<Complex64>,
    /// The true channel covariance `G R0` of this user at this BS.
    pub g_r0: DMatrix<Complex64>,
}

impl Estimate {
    /// Covariance of the accumulative error at aging level `|ρ[n]|²`:
    /// `Q = G R0 - |ρ[n]|² Φ`.
    pub fn q_matrix(&self, rho_abs_sq: f64) -> DMatrix<Complex64> {
        &self.g_r0 - &self.phi * Complex64::new(rho_abs_sq, 0.0)
    }

    /// Estimation error covariance `G R0 - Φ`.
    pub fn error_cov(&self) -> DMatrix<Complex64> {
        self.q_matrix(1.0)
    }
}

/// MMSE channel estimation from a processed pilot observation:
/// `ĥ = sqrt(P T) (G R0) Ψ⁻¹ y`.
///
/// `psi_chol` must be the factorization of the cohort's Ψ (including this
/// user). The estimator uses the true second-order statistics of the cohort.
pub fn mmse_estimate(
    power: f64,
    t_len: usize,
    g_r0: &DMatrix<Complex64>,
    psi: &DMatrix<Complex64>,
    psi_chol: &Cholesky<Complex64, Dyn>,
    y: &DVector<Complex64>,
) -> Estimate {
    let pt = power * t_len as f64;
    let h_hat = g_r0 * psi_chol.solve(y) * Complex64::new(pt.sqrt(), 0.0);
    let mut phi = g_r0 * psi_chol.solve(g_r0) * Complex64::new(pt, 0.0);
    // Symmetrize: Φ is Hermitian analytically, keep it so numerically.
    let phi_adj = phi.adjoint();
    phi = (&phi + &phi_adj) * Complex64::new(0.5, 0.0);
    Estimate {
        h_hat,
        phi,
        psi: psi.clone(),
        g_r0: g_r0.clone(),
    }
}

/// Normalized MSE of the accumulative error for one user at aging level
/// `|ρ[n]|²`:
///
/// `μ = 1 - |ρ|² ζ tr(R0 (ζ R0 + I + Σ_other ζ' R0')⁻¹ R0) / tr(R0)`
///
/// with `ζ = P T G / σ_n²`. `others` lists the pilot-sharing users'
/// `(ζ', R0')`.
pub fn nmse(
    rho_abs_sq: f64,
    zeta: f64,
    r0: &DMatrix<Complex64>,
    others: &[(f64, &DMatrix<Complex64>)],
) -> Result<f64> {
    let m = r0.nrows();
    let mut theta = DMatrix::<Complex64>::identity(m, m);
    theta += r0 * Complex64::new(zeta, 0.0);
    for (zeta_other, r0_other) in others {
        theta += *r0_other * Complex64::new(*zeta_other, 0.0);
    }
    let chol = Cholesky::new(theta)
        .ok_or_else(|| SimError::SolveFailure("Θ is not positive definite".into()))?;
    let x = chol.solve(r0);
    let tr_quad = (r0 * &x).trace().re;
    let tr_r0 = r0.trace().re;
    Ok((1.0 - rho_abs_sq * zeta * tr_quad / tr_r0).clamp(0.0, 1.0))
}

/// Contamination-free lower bound on the NMSE via the eigenvalues of R0:
/// `μ_npc = 1 - (|ρ|² ζ / M) Σ λ² / (ζ λ + 1)`.
pub fn nmse_npc_bound(rho_abs_sq: f64, zeta: f64, eigenvalues: &[f64]) -> f64 {
    let m = eigenvalues.len() as f64;
    let sum: f64 = eigenvalues
        .iter()
        .map(|&lam| lam * lam / (zeta * lam + 1.0))
        .sum();
    (1.0 - rho_abs_sq * zeta * sum / m).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{sigma_to_kappa, spatial_matrix, AngularProfile, ArrayGeometry};
    use crate::seed::SeedPath;

    fn test_r0(m: usize, kappa_r: f64, theta_c: f64) -> DMatrix<Complex64> {
        let array = ArrayGeometry::new(m, 0.075, 2.0e9).unwrap();
        let profile = AngularProfile::new(2.68, kappa_r, 0.3, theta_c, 0.1, 0.0).unwrap();
        spatial_matrix(&profile, &array).unwrap().matrix().clone()
    }

    #[test]
    fn pilot_assignment_shapes() {
        let mut rng = SeedPath::new(11).rng();
        let pa = assign_pilots(1, 40, &mut rng).unwrap();
        assert_eq!(pa.n_users(), 1);
        let t = pa.pilot_of(0);
        assert_eq!(pa.cohort(t), &[0]);
        assert!(assign_pilots(0, 4, &mut rng).is_err());
        assert!(assign_pilots(4, 0, &mut rng).is_err());
    }

    #[test]
    fn pilot_assignment_mean_cohort_size() {
        // Cohort of a fixed user is 1 + Binomial(K-1, 1/T): mean 9.975 for
        // K = 360, T = 40.
        let mut total = 0usize;
        let n_seeds = 1000;
        for s in 0..n_seeds {
            let mut rng = SeedPath::new(s).rng();
            let pa = assign_pilots(360, 40, &mut rng).unwrap();
            total += pa.cohort(pa.pilot_of(0)).len();
        }
        let mean = total as f64 / n_seeds as f64;
        assert!((mean - 9.975).abs() < 0.05 * 9.975, "mean cohort {mean}");
    }

    #[test]
    fn pilot_collisions_happen_even_with_spare_pilots() {
        let mut collided = false;
        for s in 0..50 {
            let mut rng = SeedPath::new(s).rng();
            let pa = assign_pilots(10, 10, &mut rng).unwrap();
            if (0..10).any(|t| pa.cohort(t).len() > 1) {
                collided = true;
                break;
            }
        }
        assert!(collided, "uniform choice should produce collisions");
    }

    #[test]
    fn pilot_reception_noise_free_linearity() {
        let h0 = DVector::from_vec(vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, -1.0)]);
        let h1 = DVector::from_vec(vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 3.0)]);
        let mut rng = SeedPath::new(5).rng();
        let t_len = 40;

        let y = receive_pilot([(0.1, &h0)], t_len, 0.0, 2, &mut rng);
        let expect = &h0 * Complex64::new((0.1f64 * 40.0).sqrt(), 0.0);
        assert!((y - expect).norm() < 1e-14);

        let y = receive_pilot([(0.1, &h0), (0.4, &h1)], t_len, 0.0, 2, &mut rng);
        let expect = &h0 * Complex64::new(2.0, 0.0) + &h1 * Complex64::new(4.0, 0.0);
        assert!((y - expect).norm() < 1e-14);
    }

    #[test]
    fn noise_free_singleton_estimate_recovers_channel() {
        let kappa_r = sigma_to_kappa(15.0).unwrap();
        let r0 = test_r0(4, kappa_r, -0.9);
        let g_r0 = r0.clone();
        let power = 0.1;
        let t_len = 40;

        let mut rng = SeedPath::new(6).rng();
        let s = crate::special::hermitian_psd_sqrt(&g_r0).unwrap();
        let h0 = &s * complex_gaussian(4, &mut rng);
        let y = receive_pilot([(power, &h0)], t_len, 0.0, 4, &mut rng);
        // σ_n² = 0 makes Ψ = P T G R0, which is PD only because this R0 is
        // full rank.
        let psi = build_psi(&[(power, &g_r0)], t_len, 0.0, 4);
        let chol = Cholesky::new(psi.clone()).unwrap();
        let est = mmse_estimate(power, t_len, &g_r0, &psi, &chol, &y);
        assert!(
            (&est.h_hat - &h0).norm() < 1e-6 * h0.norm(),
            "noise-free estimate should equal the channel"
        );
        assert!((&est.phi - &g_r0).norm() < 1e-8 * g_r0.norm());
    }

    #[test]
    fn zero_power_estimate_is_zero() {
        let r0 = test_r0(4, 14.59, 0.4);
        let g_r0 = r0.clone();
        let psi = build_psi(&[(0.0, &g_r0)], 40, 1e-3, 4);
        let chol = Cholesky::new(psi.clone()).unwrap();
        let y = DVector::from_element(4, Complex64::new(1.0, 1.0));
        let est = mmse_estimate(0.0, 40, &g_r0, &psi, &chol, &y);
        assert_eq!(est.h_hat.norm(), 0.0);
        assert_eq!(est.phi.norm(), 0.0);
    }

    #[test]
    fn q_matrix_is_affine_and_monotone_in_aging() {
        let kappa_r = sigma_to_kappa(15.0).unwrap();
        let r0 = test_r0(6, kappa_r, 1.2);
        let g_r0 = r0.clone() * Complex64::new(2e-12, 0.0);
        let other = test_r0(6, kappa_r, -0.4) * Complex64::new(1e-12, 0.0);
        let psi = build_psi(&[(0.1, &g_r0), (0.1, &other)], 40, 4e-16, 6);
        let chol = Cholesky::new(psi.clone()).unwrap();
        let y = DVector::from_element(6, Complex64::new(1e-6, -1e-6));
        let est = mmse_estimate(0.1, 40, &g_r0, &psi, &chol, &y);
        // trace(Q) = trace(G R0) - |ρ|² trace(Φ): affine, nonincreasing in |ρ|².
        let tr_at = |r: f64| est.q_matrix(r).trace().re;
        let t0 = tr_at(0.0);
        let t_half = tr_at(0.5);
        let t1 = tr_at(1.0);
        assert!(t0 >= t_half && t_half >= t1);
        let affine_mid = 0.5 * (t0 + t1);
        assert!((t_half - affine_mid).abs() <= 1e-12 * t0.abs());
        // Q PSD for |ρ| ≤ 1.
        for &r in &[0.0, 0.3, 1.0] {
            crate::special::hermitian_psd_eigenvalues(&est.q_matrix(r)).unwrap();
        }
    }

    #[test]
    fn nmse_all_aging_gives_one() {
        let r0 = test_r0(4, 14.59, 0.0);
        let mu = nmse(0.0, 100.0, &r0, &[]).unwrap();
        assert_eq!(mu, 1.0);
    }

    #[test]
    fn nmse_perfect_estimation_limit() {
        // Singleton cohort, huge ζ, ρ = 1, full-rank R0: μ -> 0.
        let r0 = test_r0(4, 2.0, 0.0);
        let mu = nmse(1.0, 1e12, &r0, &[]).unwrap();
        assert!(mu < 1e-9, "μ = {mu}");
    }

    #[test]
    fn nmse_equals_bound_for_singleton_and_orthogonal_cohorts() {
        let r0 = test_r0(6, 14.59, 0.7);
        let zeta = 500.0;
        let rho_sq = 0.8;
        let lambdas = crate::special::hermitian_psd_eigenvalues(&r0).unwrap();
        let bound = nmse_npc_bound(rho_sq, zeta, &lambdas);

        let mu_single = nmse(rho_sq, zeta, &r0, &[]).unwrap();
        assert!((mu_single - bound).abs() < 1e-12);

        // Orthogonal-support contaminator: R0 R0' = 0 exactly.
        let m = 6;
        let mut a = DMatrix::<Complex64>::zeros(m, m);
        let mut b = DMatrix::<Complex64>::zeros(m, m);
        for i in 0..3 {
            a[(i, i)] = Complex64::new(2.0, 0.0);
            b[(i + 3, i + 3)] = Complex64::new(2.0, 0.0);
        }
        let lambdas_a = crate::special::hermitian_psd_eigenvalues(&a).unwrap();
        let bound_a = nmse_npc_bound(rho_sq, zeta, &lambdas_a);
        let mu_orth = nmse(rho_sq, zeta, &a, &[(zeta, &b)]).unwrap();
        assert!(
            (mu_orth - bound_a).abs() < 1e-10,
            "orthogonal case should attain the bound"
        );

        // Identical contaminator: strictly above the bound.
        let mu_same = nmse(rho_sq, zeta, &r0, &[(zeta, &r0)]).unwrap();
        assert!(mu_same > bound + 1e-6);
    }

    #[test]
    fn npc_bound_extremes_over_unit_trace_spectra() {
        // Among spectra with Σλ = M, λ ≡ 1 maximizes μ_npc and the rank-one
        // spectrum (M, 0, ..) minimizes it.
        let m = 8;
        let zeta = 50.0;
        let rho_sq = 0.9;
        let uniform = nmse_npc_bound(rho_sq, zeta, &vec![1.0; m]);
        let rank_one = {
            let mut spec = vec![0.0; m];
            spec[0] = m as f64;
            nmse_npc_bound(rho_sq, zeta, &spec)
        };
        let mut rng = SeedPath::new(8).rng();
        for _ in 0..100 {
            let mut spec: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
            let sum: f64 = spec.iter().sum();
            spec.iter_mut().for_each(|x| *x *= m as f64 / sum);
            let mu = nmse_npc_bound(rho_sq, zeta, &spec);
            assert!(mu <= uniform + 1e-12);
            assert!(mu >= rank_one - 1e-12);
        }
        assert_eq!(nmse_npc_bound(0.9, 0.0, &vec![1.0; m]), 1.0);
    }
}
