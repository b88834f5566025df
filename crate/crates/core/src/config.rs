//! Run configuration: scenario defaults, Monte Carlo knobs, the noise-power
//! convention, and content hashing for reproducible output bundles.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correlation::ArrayGeometry;
use crate::error::{Result, SimError};
use crate::receiver::Combiner;
use crate::scenarios::{
    build_freeway, build_manhattan, FreewayParams, ManhattanParams, NetworkLayout, Scenario,
};
use crate::sweep::SimParams;

/// Version tag embedded in every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Full description of a run. Round-trips losslessly through JSON; the
/// content hash of the serialized form is embedded in every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub combiner: Combiner,

    /// BS antenna count.
    pub m: usize,
    /// Element spacing (m).
    pub d: f64,
    /// Carrier frequency (Hz).
    pub f_c: f64,
    /// Symbol period (s).
    pub ts: f64,
    /// Pilot symbols per block.
    pub t_pilot: usize,
    /// Thermal noise density (dBm/Hz).
    pub noise_density_dbm_hz: f64,
    /// Per-VUE transmit power (W).
    pub tx_power_w: f64,

    /// Default operating point.
    pub sigma_t_deg: f64,
    pub sigma_r_deg: f64,
    pub v: f64,

    pub density_per_m_per_lane: f64,
    pub shadow_sigma_db: f64,
    pub vue_antenna_height: f64,

    /// Sweep axes for the block-size optimization pipeline.
    pub sweep_sigma_t_deg: Vec<f64>,
    pub sweep_sigma_r_deg: Vec<f64>,
    pub sweep_v: Vec<f64>,

    /// Coarse block-size grid and the refinement pass around its argmax.
    pub c_grid_start: usize,
    pub c_grid_stop: usize,
    pub c_grid_step: usize,
    pub refine_window: usize,
    pub refine_step: usize,

    pub n_drops: usize,
    pub n_channel: usize,
    /// Symbol decimation stride for SINR evaluation.
    pub stride: usize,
    pub master_seed: u64,
    /// Block size used by the single-point SE command.
    pub block_c: usize,
    /// Force the non-aging reference (ρ ≡ 1).
    pub rho_override_one: bool,
}

impl RunConfig {
    /// Desk-scale freeway defaults (Table-level geometry, M = 32).
    pub fn freeway_default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            scenario: Scenario::Freeway,
            combiner: Combiner::Mr,
            m: 32,
            d: 0.075,
            f_c: 2.0e9,
            ts: 1e-5,
            t_pilot: 40,
            noise_density_dbm_hz: -174.0,
            tx_power_w: 0.1,
            sigma_t_deg: 35.0,
            sigma_r_deg: 15.0,
            v: 33.33,
            density_per_m_per_lane: 0.004,
            shadow_sigma_db: 10.0,
            vue_antenna_height: 1.5,
            sweep_sigma_t_deg: vec![5.0, 27.5, 50.0],
            sweep_sigma_r_deg: vec![5.0, 27.5, 50.0],
            sweep_v: vec![19.44, 29.17, 38.89],
            c_grid_start: 60,
            c_grid_stop: 1000,
            c_grid_step: 20,
            refine_window: 40,
            refine_step: 5,
            n_drops: 20,
            n_channel: 10,
            stride: 8,
            master_seed: 1,
            block_c: 200,
            rho_override_one: false,
        }
    }

    /// Desk-scale urban Manhattan defaults. The block-size grid extends
    /// further than the freeway's: at low urban speeds with concentrated
    /// AoD the desk-scale ASE optimum sits beyond 1000 symbols.
    pub fn manhattan_default() -> Self {
        RunConfig {
            scenario: Scenario::Manhattan,
            v: 16.67,
            density_per_m_per_lane: 0.0125,
            sweep_v: vec![8.33, 20.83, 33.33],
            c_grid_stop: 1400,
            ..Self::freeway_default()
        }
    }

    pub fn default_for(scenario: Scenario) -> Self {
        match scenario {
            Scenario::Freeway => Self::freeway_default(),
            Scenario::Manhattan => Self::manhattan_default(),
        }
    }

    /// Switch to the full-scale configuration (M = 100, half-wavelength
    /// spacing at 2 GHz). Monte Carlo counts stay caller-controlled.
    pub fn apply_paper_fidelity(&mut self) {
        self.m = 100;
        self.d = 0.075;
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(SimError::Config(msg));
        if self.m < 1 {
            return err("antenna count must be >= 1".into());
        }
        if !(self.d > 0.0 && self.f_c > 0.0 && self.ts > 0.0) {
            return err("d, f_c, Ts must be positive".into());
        }
        if self.t_pilot < 1 {
            return err("pilot length must be >= 1".into());
        }
        if self.block_c <= self.t_pilot {
            return err(format!(
                "block_c must exceed the pilot length, got C={} T={}",
                self.block_c, self.t_pilot
            ));
        }
        if self.c_grid_start <= self.t_pilot {
            return err(format!(
                "c_grid_start must exceed the pilot length, got {} vs T={}",
                self.c_grid_start, self.t_pilot
            ));
        }
        if self.c_grid_stop < self.c_grid_start || self.c_grid_step == 0 {
            return err("invalid block-size grid".into());
        }
        if self.n_drops == 0 || self.n_channel == 0 || self.stride == 0 {
            return err("n_drops, n_channel, stride must be positive".into());
        }
        if !(self.tx_power_w >= 0.0) || !(self.density_per_m_per_lane > 0.0) {
            return err("transmit power and VUE density must be positive".into());
        }
        if self.sweep_sigma_t_deg.is_empty()
            || self.sweep_sigma_r_deg.is_empty()
            || self.sweep_v.is_empty()
        {
            return err("sweep axes must be non-empty".into());
        }
        Ok(())
    }

    /// Noise power in watts over the symbol-rate bandwidth `B = 1/Ts`:
    /// `σ_n² = 10^((N0_dBm/Hz + 10 log10 B) / 10) / 1000`.
    pub fn noise_power_w(&self) -> f64 {
        let bandwidth = 1.0 / self.ts;
        let dbm = self.noise_density_dbm_hz + 10.0 * bandwidth.log10();
        10f64.powf(dbm / 10.0) / 1000.0
    }

    pub fn array(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.m, self.d, self.f_c)
    }

    pub fn layout(&self) -> Result<NetworkLayout> {
        match self.scenario {
            Scenario::Freeway => build_freeway(&FreewayParams::default()),
            Scenario::Manhattan => build_manhattan(&ManhattanParams::default()),
        }
    }

    pub fn sim_params(&self) -> Result<SimParams> {
        self.validate()?;
        Ok(SimParams {
            array: self.array()?,
            ts: self.ts,
            t_pilot: self.t_pilot,
            sigma_n2: self.noise_power_w(),
            tx_power_w: self.tx_power_w,
            density: self.density_per_m_per_lane,
            shadow_sigma_db: self.shadow_sigma_db,
            vue_antenna_height: self.vue_antenna_height,
            stride: self.stride,
            n_drops: self.n_drops,
            n_channel: self.n_channel,
            rho_override_one: self.rho_override_one,
        })
    }

    /// The coarse block-size grid.
    pub fn c_grid(&self) -> Vec<usize> {
        (self.c_grid_start..=self.c_grid_stop)
            .step_by(self.c_grid_step)
            .collect()
    }

    /// Content hash of the serialized configuration (first 16 hex digits of
    /// SHA-256). Identical configs produce identical hashes.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| SimError::Config(format!("cannot parse config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
