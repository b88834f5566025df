//! Lightweight schema validation for the JSON artifacts: every emitted file
//! must parse back and carry the expected fields and types.

use serde_json::Value;

pub type SchemaResult = Result<(), String>;

fn require<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field `{key}`"))
}

fn require_u64(v: &Value, key: &str) -> Result<u64, String> {
    require(v, key)?
        .as_u64()
        .ok_or_else(|| format!("field `{key}` must be an unsigned integer"))
}

fn require_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, String> {
    require(v, key)?
        .as_str()
        .ok_or_else(|| format!("field `{key}` must be a string"))
}

fn require_f64(v: &Value, key: &str) -> Result<f64, String> {
    require(v, key)?
        .as_f64()
        .ok_or_else(|| format!("field `{key}` must be a number"))
}

fn require_bool(v: &Value, key: &str) -> Result<bool, String> {
    require(v, key)?
        .as_bool()
        .ok_or_else(|| format!("field `{key}` must be a bool"))
}

fn require_array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, String> {
    require(v, key)?
        .as_array()
        .ok_or_else(|| format!("field `{key}` must be an array"))
}

fn check_scenario(v: &Value, key: &str) -> SchemaResult {
    let s = require_str(v, key)?;
    if s == "freeway" || s == "manhattan" {
        Ok(())
    } else {
        Err(format!("invalid scenario `{s}`"))
    }
}

fn check_combiner(v: &Value, key: &str) -> SchemaResult {
    let s = require_str(v, key)?;
    if s == "mr" || s == "mmse" {
        Ok(())
    } else {
        Err(format!("invalid combiner `{s}`"))
    }
}

fn check_point(v: &Value) -> SchemaResult {
    require_f64(v, "sigma_t_deg")?;
    require_f64(v, "sigma_r_deg")?;
    require_f64(v, "v")?;
    Ok(())
}

/// Validate an `ase-sweep` summary document.
fn check_generator(v: &Value) -> SchemaResult {
    require_str(v, "generator_family")?;
    Ok(())
}

fn check_config(v: &Value) -> SchemaResult {
    let cfg = require(v, "config")?;
    if !cfg.is_object() {
        return Err("field `config` must be an object".into());
    }
    require_u64(cfg, "m")?;
    require_f64(cfg, "ts")?;
    require_u64(cfg, "master_seed")?;
    Ok(())
}

pub fn validate_sweep_summary(v: &Value) -> SchemaResult {
    require_u64(v, "schema_version")?;
    require_str(v, "config_hash")?;
    check_generator(v)?;
    check_config(v)?;
    check_scenario(v, "scenario")?;
    check_combiner(v, "combiner")?;
    require_f64(v, "wall_clock_seconds")?;
    for curve in require_array(v, "curves")? {
        check_point(require(curve, "point")?)?;
        let c_grid = require_array(curve, "c_grid")?;
        let mean = require_array(curve, "ase_mean")?;
        let stderr = require_array(curve, "ase_stderr")?;
        if c_grid.len() != mean.len() || mean.len() != stderr.len() {
            return Err("curve arrays must have equal length".into());
        }
        if c_grid.is_empty() {
            return Err("curve must have at least one sample".into());
        }
        require_u64(curve, "c_opt")?;
        require_bool(curve, "endpoint_warning")?;
    }
    Ok(())
}

/// Validate a `copt-fit` document.
pub fn validate_fit_summary(v: &Value) -> SchemaResult {
    require_u64(v, "schema_version")?;
    require_str(v, "config_hash")?;
    check_generator(v)?;
    check_config(v)?;
    require_f64(v, "wall_clock_seconds")?;
    for fit in require_array(v, "fits")? {
        check_scenario(fit, "scenario")?;
        check_combiner(fit, "combiner")?;
        require_str(fit, "source_config_hash")?;
        for key in ["a0", "a_v", "a_t", "a_r", "r2bar", "nrmse"] {
            require_f64(fit, key)?;
        }
        require_bool(fit, "degenerate")?;
        require_u64(fit, "n_samples")?;
    }
    Ok(())
}

/// Validate an `se` summary document.
pub fn validate_se_summary(v: &Value) -> SchemaResult {
    require_u64(v, "schema_version")?;
    require_str(v, "config_hash")?;
    check_generator(v)?;
    check_config(v)?;
    check_scenario(v, "scenario")?;
    check_combiner(v, "combiner")?;
    require_u64(v, "block_c")?;
    require_f64(v, "ase_mean")?;
    require_f64(v, "ase_stderr")?;
    require_f64(v, "wall_clock_seconds")?;
    for user in require_array(v, "users")? {
        require_u64(user, "vue_id")?;
        require_u64(user, "bs_id")?;
        require_u64(user, "pilot")?;
        require_f64(user, "gain_db")?;
        require_f64(user, "block_se")?;
    }
    Ok(())
}

/// Validate a `layout-dump` document.
pub fn validate_layout_dump(v: &Value) -> SchemaResult {
    check_scenario(v, "scenario")?;
    for bs in require_array(v, "bs")? {
        let pos = require_array(bs, "pos")?;
        if pos.len() != 2 {
            return Err("bs position must be [x, y]".into());
        }
        require_f64(bs, "height")?;
        require_f64(bs, "alpha")?;
    }
    for lane in require_array(v, "lanes")? {
        require_array(lane, "origin")?;
        require_array(lane, "direction")?;
        require_f64(lane, "length")?;
        require_f64(lane, "width")?;
    }
    require_array(v, "vues")?;
    require_array(v, "serving")?;
    Ok(())
}
