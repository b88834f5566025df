//! Output artifacts: CSV tables and JSON summaries.
//!
//! Numeric CSV payloads print floats with 17 significant digits so that a
//! byte-level comparison is meaningful: identical runs produce identical
//! files regardless of thread count. Every file embeds the configuration
//! content hash.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

use vmimo_core::config::RunConfig;
use vmimo_core::receiver::Combiner;
use vmimo_core::scenarios::Scenario;
use vmimo_core::sweep::{AseCurve, SweepPoint};

/// 17 significant digits: round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV file with the hash comment line, a fixed header, and rows.
pub fn write_csv(
    path: &Path,
    config_hash: &str,
    header: &str,
    rows: &[String],
    footer: Option<&str>,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={config_hash}\n"));
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    if let Some(f) = footer {
        out.push_str(f);
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// One swept operating point with its ASE curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRecord {
    pub point: SweepPoint,
    pub c_grid: Vec<usize>,
    pub ase_mean: Vec<f64>,
    pub ase_stderr: Vec<f64>,
    pub c_opt: usize,
    pub endpoint_warning: bool,
}

impl CurveRecord {
    pub fn new(point: SweepPoint, curve: AseCurve) -> Self {
        CurveRecord {
            point,
            c_grid: curve.c_grid,
            ase_mean: curve.ase_mean,
            ase_stderr: curve.ase_stderr,
            c_opt: curve.c_opt,
            endpoint_warning: curve.endpoint_warning,
        }
    }
}

/// The `ase-sweep` summary artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub config_hash: String,
    /// RNG family behind the seed tree (stream reproduction requires it).
    pub generator_family: String,
    pub scenario: Scenario,
    pub combiner: Combiner,
    /// Full configuration snapshot the sweep ran under.
    pub config: RunConfig,
    pub curves: Vec<CurveRecord>,
    pub wall_clock_seconds: f64,
}

/// One fitted empirical model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitRecord {
    pub scenario: Scenario,
    pub combiner: Combiner,
    pub source_config_hash: String,
    pub a0: f64,
    pub a_v: f64,
    pub a_t: f64,
    pub a_r: f64,
    pub r2bar: f64,
    pub nrmse: f64,
    pub degenerate: bool,
    pub n_samples: usize,
}

/// The `copt-fit` artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitSummary {
    pub schema_version: u32,
    pub config_hash: String,
    pub generator_family: String,
    pub config: RunConfig,
    pub fits: Vec<FitRecord>,
    pub wall_clock_seconds: f64,
}

/// The `se` command JSON mirror.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeSummary {
    pub schema_version: u32,
    pub config_hash: String,
    pub generator_family: String,
    pub config: RunConfig,
    pub scenario: Scenario,
    pub combiner: Combiner,
    pub block_c: usize,
    pub users: Vec<SeUser>,
    pub ase_mean: f64,
    pub ase_stderr: f64,
    pub wall_clock_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeUser {
    pub vue_id: usize,
    pub bs_id: usize,
    pub pilot: usize,
    pub gain_db: f64,
    pub block_se: f64,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable artifact");
    fs::write(path, text + "\n")
}

/// Identifier of the seed-derivation and stream generator pair.
pub const GENERATOR_FAMILY: &str = "splitmix64-tree/chacha8";
