//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use vmimo_core::config::{RunConfig, SCHEMA_VERSION};
use vmimo_core::correlation::{acf, scf, AngularProfile, ArrayGeometry};
use vmimo_core::scenarios::{generate_drop, DropSpec, LayoutDump};
use vmimo_core::seed::SeedPath;
use vmimo_core::sweep::{
    copt_search, delta_ase, evaluate_single, find_copt, fit_copt_model, FitModel, SweepPoint,
};

use crate::output::{
    fmt_f64, write_csv, write_json, CurveRecord, FitRecord, FitSummary, SeSummary, SeUser,
    SweepSummary,
};
use crate::schema;
use crate::CliError;

// Seed-tree stage tags owned by the CLI orchestration layer.
const STAGE_SWEEP_POINT: u64 = 100;
const STAGE_DELTA: u64 = 101;
const STAGE_SE: u64 = 102;
const STAGE_DUMP: u64 = 103;

fn validate_json_file<F: Fn(&serde_json::Value) -> Result<(), String>>(
    path: &Path,
    validator: F,
) -> Result<(), CliError> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Numeric(format!("{}: invalid JSON: {e}", path.display())))?;
    validator(&value)
        .map_err(|e| CliError::Numeric(format!("{}: schema violation: {e}", path.display())))
}

/// Sweep points in a fixed deterministic order.
fn sweep_points(cfg: &RunConfig) -> Vec<SweepPoint> {
    let mut points = Vec::new();
    for &st in &cfg.sweep_sigma_t_deg {
        for &sr in &cfg.sweep_sigma_r_deg {
            for &v in &cfg.sweep_v {
                points.push(SweepPoint {
                    sigma_t_deg: st,
                    sigma_r_deg: sr,
                    v,
                });
            }
        }
    }
    points
}

fn point_key(p: &SweepPoint) -> String {
    format!("{},{},{}", fmt_f64(p.sigma_t_deg), fmt_f64(p.sigma_r_deg), fmt_f64(p.v))
}

// ---------------------------------------------------------------------------
// stcc
// ---------------------------------------------------------------------------

/// Tabulate |ρ(τ) s(p,q)| for adjacent elements over (d, τ) grids for the
/// six reference scattering/mobility parameter sets.
pub fn cmd_stcc(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let hash = cfg.content_hash();
    // (tag, κ_T, κ_R, γ-φ_c, α-θ_c, v)
    let deg90 = std::f64::consts::FRAC_PI_2;
    let sets: [(&str, f64, f64, f64, f64, f64); 6] = [
        ("a", 0.0, 0.0, 0.0, 0.0, 16.67),
        ("b", 0.0, 0.0, 0.0, 0.0, 33.33),
        ("c", 2.68, 14.59, 0.0, 0.0, 16.67),
        ("d", 2.68, 14.59, 0.0, 0.0, 33.33),
        ("e", 2.68, 14.59, deg90, deg90, 16.67),
        ("f", 2.68, 14.59, deg90, deg90, 33.33),
    ];
    let lambda = vmimo_core::SPEED_OF_LIGHT / cfg.f_c;
    let base_array = ArrayGeometry::new(2, 0.075, cfg.f_c)?;
    for (tag, kappa_t, kappa_r, rel_motion, rel_orientation, v) in sets {
        let profile = AngularProfile::new(kappa_t, kappa_r, 0.0, 0.0, rel_motion, rel_orientation)?;
        let mut rows = Vec::new();
        for di in 0..=60 {
            let d = di as f64 * 0.05 * lambda;
            let s = if di == 0 {
                // Coincident elements: b = 0 exactly.
                scf(&profile, &base_array, 1, 1)?
            } else {
                let array = ArrayGeometry::new(2, d, cfg.f_c)?;
                scf(&profile, &array, 2, 1)?
            };
            for ti in 0..=50 {
                let tau = ti as f64 * 1e-4;
                let rho = acf(&profile, v, &base_array, tau);
                let stcc = rho * s;
                rows.push(format!(
                    "{},{},{},{},{}",
                    fmt_f64(d),
                    fmt_f64(tau),
                    fmt_f64(stcc.norm()),
                    fmt_f64(stcc.re),
                    fmt_f64(stcc.im)
                ));
            }
        }
        let path = out.join(format!("stcc_{tag}.csv"));
        write_csv(&path, &hash, "d,tau,abs_stcc,re,im", &rows, None)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// se
// ---------------------------------------------------------------------------

/// Per-user SE and per-cell ASE for the configured operating point at one
/// block size.
pub fn cmd_se(cfg: &RunConfig, out: &Path, rho_one: bool) -> Result<(), CliError> {
    let start = Instant::now();
    let mut params = cfg.sim_params()?;
    params.rho_override_one = params.rho_override_one || rho_one;
    let layout = cfg.layout()?;
    let point = SweepPoint {
        sigma_t_deg: cfg.sigma_t_deg,
        sigma_r_deg: cfg.sigma_r_deg,
        v: cfg.v,
    };
    let master = SeedPath::new(cfg.master_seed).child(STAGE_SE);
    let detail = evaluate_single(&layout, &point, cfg.block_c, &params, cfg.combiner, master)?;

    let hash = cfg.content_hash();
    let mut rows = Vec::new();
    let mut users = Vec::new();
    for k in 0..detail.drop.n_users() {
        let bs = detail.drop.serving[k];
        let pilot = detail.drop.pilots.pilot_of(k);
        let gain_db = detail.drop.links[bs][k].large_scale.gain_db;
        let block_se = detail.se_per_user[k];
        rows.push(format!(
            "{k},{bs},{pilot},{},{}",
            fmt_f64(gain_db),
            fmt_f64(block_se)
        ));
        users.push(SeUser {
            vue_id: k,
            bs_id: bs,
            pilot,
            gain_db,
            block_se,
        });
    }
    let footer = format!(
        "# ase,{},{}",
        fmt_f64(detail.ase_mean),
        fmt_f64(detail.ase_stderr)
    );
    write_csv(
        &out.join("se.csv"),
        &hash,
        "vue_id,bs_id,pilot,G_db,block_se",
        &rows,
        Some(&footer),
    )?;

    let summary = SeSummary {
        schema_version: SCHEMA_VERSION,
        config_hash: hash,
        generator_family: crate::output::GENERATOR_FAMILY.to_string(),
        config: cfg.clone(),
        scenario: cfg.scenario,
        combiner: cfg.combiner,
        block_c: cfg.block_c,
        users,
        ase_mean: detail.ase_mean,
        ase_stderr: detail.ase_stderr,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let json_path = out.join("se.json");
    write_json(&json_path, &summary)?;
    validate_json_file(&json_path, schema::validate_se_summary)
}

// ---------------------------------------------------------------------------
// ase-sweep
// ---------------------------------------------------------------------------

fn parse_existing_rows(
    csv_path: &Path,
    expected_hash: &str,
) -> Result<BTreeMap<String, Vec<(usize, f64, f64)>>, CliError> {
    let text = fs::read_to_string(csv_path)?;
    let mut rows = BTreeMap::new();
    for line in text.lines() {
        if let Some(hash) = line.strip_prefix("# config_hash=") {
            if hash != expected_hash {
                return Err(CliError::Config(format!(
                    "cannot resume: existing sweep was produced by config {hash}, current is {expected_hash}"
                )));
            }
            continue;
        }
        if line.starts_with('#') || line.starts_with("scenario") || line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::Numeric(format!(
                "malformed sweep row: `{line}`"
            )));
        }
        let key = format!("{},{},{}", fields[2], fields[3], fields[4]);
        let c: usize = fields[5]
            .parse()
            .map_err(|_| CliError::Numeric(format!("bad C in row `{line}`")))?;
        let mean: f64 = fields[6]
            .parse()
            .map_err(|_| CliError::Numeric(format!("bad mean in row `{line}`")))?;
        let stderr: f64 = fields[7]
            .parse()
            .map_err(|_| CliError::Numeric(format!("bad stderr in row `{line}`")))?;
        rows.entry(key).or_insert_with(Vec::new).push((c, mean, stderr));
    }
    Ok(rows)
}

/// ASE-vs-C curves over the configured sweep grid, with per-point resume.
///
/// Points are evaluated sequentially (drops in parallel inside each point)
/// and appended to the CSV as they complete, so an interrupted sweep can be
/// resumed with `--resume`: completed (point, C) rows are never recomputed.
pub fn cmd_ase_sweep(cfg: &RunConfig, out: &Path, resume: bool) -> Result<(), CliError> {
    let start = Instant::now();
    let params = cfg.sim_params()?;
    let layout = cfg.layout()?;
    let hash = cfg.content_hash();
    let csv_path = out.join("ase_sweep.csv");
    let header = "scenario,combiner,sigma_t_deg,sigma_r_deg,v,c,ase_mean,ase_stderr";

    let existing = if resume && csv_path.exists() {
        parse_existing_rows(&csv_path, &hash)?
    } else {
        BTreeMap::new()
    };

    let mut csv_body = String::new();
    csv_body.push_str(&format!("# config_hash={hash}\n{header}\n"));

    let points = sweep_points(cfg);
    let coarse = cfg.c_grid();
    let mut curves = Vec::with_capacity(points.len());
    for (idx, point) in points.iter().enumerate() {
        let key = point_key(point);
        let record = if let Some(rows) = existing.get(&key) {
            let mut rows = rows.clone();
            rows.sort_by_key(|&(c, _, _)| c);
            let c_grid: Vec<usize> = rows.iter().map(|&(c, _, _)| c).collect();
            let ase_mean: Vec<f64> = rows.iter().map(|&(_, m, _)| m).collect();
            let ase_stderr: Vec<f64> = rows.iter().map(|&(_, _, s)| s).collect();
            let (c_opt, endpoint_warning) = find_copt(&c_grid, &ase_mean)?;
            CurveRecord {
                point: *point,
                c_grid,
                ase_mean,
                ase_stderr,
                c_opt,
                endpoint_warning,
            }
        } else {
            let master = SeedPath::new(cfg.master_seed)
                .child(STAGE_SWEEP_POINT)
                .child(idx as u64);
            let curve = copt_search(
                &layout,
                point,
                &coarse,
                cfg.refine_window,
                cfg.refine_step,
                &params,
                cfg.combiner,
                master,
            )?;
            CurveRecord::new(*point, curve)
        };

        for i in 0..record.c_grid.len() {
            csv_body.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                cfg.scenario,
                cfg.combiner,
                fmt_f64(point.sigma_t_deg),
                fmt_f64(point.sigma_r_deg),
                fmt_f64(point.v),
                record.c_grid[i],
                fmt_f64(record.ase_mean[i]),
                fmt_f64(record.ase_stderr[i]),
            ));
        }
        // Rewrite after every completed point so interruption never loses
        // finished work and never leaves partial points behind.
        fs::write(&csv_path, &csv_body)?;
        curves.push(record);
    }

    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        config_hash: hash,
        generator_family: crate::output::GENERATOR_FAMILY.to_string(),
        scenario: cfg.scenario,
        combiner: cfg.combiner,
        config: cfg.clone(),
        curves,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let json_path = out.join("ase_sweep.json");
    write_json(&json_path, &summary)?;
    validate_json_file(&json_path, schema::validate_sweep_summary)
}

// ---------------------------------------------------------------------------
// copt-fit
// ---------------------------------------------------------------------------

/// Fit the empirical block-size model from one or more sweep summaries (one
/// per scenario × combiner cell).
pub fn cmd_copt_fit(cfg: &RunConfig, out: &Path, sweeps: &[PathBuf]) -> Result<(), CliError> {
    let start = Instant::now();
    let mut fits = Vec::new();
    for path in sweeps {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", path.display())))?;
        schema::validate_sweep_summary(&value)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let summary: SweepSummary = serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let samples: Vec<(SweepPoint, f64)> = summary
            .curves
            .iter()
            .map(|c| (c.point, c.c_opt as f64))
            .collect();
        let fit = fit_copt_model(&samples)?;
        fits.push(FitRecord {
            scenario: summary.scenario,
            combiner: summary.combiner,
            source_config_hash: summary.config_hash.clone(),
            a0: fit.a0,
            a_v: fit.a_v,
            a_t: fit.a_t,
            a_r: fit.a_r,
            r2bar: fit.r2bar,
            nrmse: fit.nrmse,
            degenerate: fit.degenerate,
            n_samples: samples.len(),
        });
    }
    let summary = FitSummary {
        schema_version: SCHEMA_VERSION,
        config_hash: cfg.content_hash(),
        generator_family: crate::output::GENERATOR_FAMILY.to_string(),
        config: cfg.clone(),
        fits,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let json_path = out.join("copt_fit.json");
    write_json(&json_path, &summary)?;
    validate_json_file(&json_path, schema::validate_fit_summary)
}

// ---------------------------------------------------------------------------
// delta-ase
// ---------------------------------------------------------------------------

/// ΔASE between the fitted optimal block size and the coherence baseline,
/// per sweep point.
pub fn cmd_delta_ase(cfg: &RunConfig, out: &Path, fit_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(fit_path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: invalid JSON: {e}", fit_path.display())))?;
    schema::validate_fit_summary(&value)
        .map_err(|e| CliError::Config(format!("{}: {e}", fit_path.display())))?;
    let fit_summary: FitSummary = serde_json::from_value(value)
        .map_err(|e| CliError::Config(format!("{}: {e}", fit_path.display())))?;
    let record = fit_summary
        .fits
        .iter()
        .find(|f| f.scenario == cfg.scenario && f.combiner == cfg.combiner)
        .ok_or_else(|| {
            CliError::Config(format!(
                "fit file has no entry for scenario={} combiner={}",
                cfg.scenario, cfg.combiner
            ))
        })?;
    let model = FitModel {
        a0: record.a0,
        a_v: record.a_v,
        a_t: record.a_t,
        a_r: record.a_r,
        r2bar: record.r2bar,
        nrmse: record.nrmse,
        degenerate: record.degenerate,
    };

    let params = cfg.sim_params()?;
    let layout = cfg.layout()?;
    let hash = cfg.content_hash();
    let mut rows = Vec::new();
    for (idx, point) in sweep_points(cfg).iter().enumerate() {
        let master = SeedPath::new(cfg.master_seed).child(STAGE_DELTA).child(idx as u64);
        let d = delta_ase(&layout, point, &model, &params, cfg.combiner, master)?;
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            cfg.scenario,
            cfg.combiner,
            fmt_f64(point.sigma_t_deg),
            fmt_f64(point.sigma_r_deg),
            fmt_f64(point.v),
            d.c_star,
            d.c_v,
            fmt_f64(d.ase_star),
            fmt_f64(d.ase_star_stderr),
            fmt_f64(d.ase_cv),
            fmt_f64(d.ase_cv_stderr),
            fmt_f64(d.delta),
            fmt_f64(d.delta_stderr),
        ));
    }
    write_csv(
        &out.join("delta_ase.csv"),
        &hash,
        "scenario,combiner,sigma_t_deg,sigma_r_deg,v,c_star,c_v,ase_opt,ase_opt_stderr,ase_cv,ase_cv_stderr,delta_ase,delta_stderr",
        &rows,
        None,
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// layout-dump
// ---------------------------------------------------------------------------

/// Dump the scenario geometry plus one seeded drop as JSON.
pub fn cmd_layout_dump(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let layout = cfg.layout()?;
    let spec = DropSpec {
        v: cfg.v,
        kappa_t: vmimo_core::correlation::sigma_to_kappa(cfg.sigma_t_deg)?,
        kappa_r: vmimo_core::correlation::sigma_to_kappa(cfg.sigma_r_deg)?,
        density: cfg.density_per_m_per_lane,
        tx_power_w: cfg.tx_power_w,
        array: cfg.array()?,
        n_pilots: cfg.t_pilot,
        shadow_sigma_db: cfg.shadow_sigma_db,
        vue_antenna_height: cfg.vue_antenna_height,
    };
    let drop = generate_drop(
        &layout,
        &spec,
        SeedPath::new(cfg.master_seed).child(STAGE_DUMP),
    )?;
    let dump = LayoutDump::from_drop(&drop);
    let json_path = out.join("layout.json");
    write_json(&json_path, &dump)?;
    validate_json_file(&json_path, schema::validate_layout_dump)
}
