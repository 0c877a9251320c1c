//! Configuration-driven sweeps over (SNR, multiplexing gain) grids.
//!
//! Every cell carries the Monte Carlo estimate next to each closed form that
//! applies to the configured channel. Rows are sorted by `(r, snr_db)` and
//! depend only on the configuration, so two runs with the same config and
//! seed produce byte-identical CSV apart from the `#` comment line.

mod config;
mod csv_io;

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{parse_matrix, read_matrix_file, CMode, CValues, DbGrid, ModelSpec, SideSpec, SweepConfig};
pub use csv_io::{read_csv, write_csv, SweepRow, HEADER};

use crate::analytic::{
    dmt, low_outage_approx_correlated, low_outage_approx_iid, low_snr_outage, power_gain_cdf,
    regime_boundaries, scalar_outage_exact, target_rate, MultiplexingGain, PiecewiseParams, Snr,
};
use crate::channel::ChannelModel;
use crate::error::Error;
use crate::montecarlo::{calibrate_c, estimate_outage, Calibration};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix file {path}: {msg}")]
    Matrix { path: PathBuf, msg: String },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV row {row}: {msg}")]
    Schema { row: usize, msg: String },
    #[error(transparent)]
    Model(#[from] Error),
}

/// Result of a sweep: rows plus everything the summary reports.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub calibrations: Vec<(f64, Calibration)>,
    pub warnings: Vec<String>,
    pub config_hash: String,
}

/// SHA-256 of the canonical JSON form of the config.
pub fn config_hash(config: &SweepConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Cells whose outage count falls below this give a CI half-width above
/// roughly 20% of the estimate.
const LOW_COUNT_WARNING: u64 = 100;

pub fn run_sweep(config: &SweepConfig, base: &std::path::Path) -> Result<SweepOutput, SweepError> {
    config.validate()?;
    let model = config.build_model(base)?;
    let mut warnings = Vec::new();
    if model.rescaled() {
        warnings.push("correlation input was rescaled to trace m*n".to_string());
    }

    let calibrations = match &config.c_mode {
        CMode::Calibrate { anchors_db } => calibrate_all(config, &model, anchors_db, &mut warnings)?,
        _ => Vec::new(),
    };

    let snrs = config.snr_db.points();
    let cells: Vec<(usize, f64)> = (0..config.r.len())
        .flat_map(|ri| snrs.iter().map(move |&db| (ri, db)))
        .collect();
    let label = config.model_label();
    let mut rows = cells
        .par_iter()
        .map(|&(ri, db)| {
            let c = config
                .user_c(ri)
                .or_else(|| calibrations.get(ri).map(|(_, cal)| cal.c));
            evaluate_cell(config, &model, &label, config.r[ri], db, c)
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    rows.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.snr_db.total_cmp(&b.snr_db)));

    for row in &rows {
        let count = (row.p_mc * row.trials as f64).round() as u64;
        if count < LOW_COUNT_WARNING {
            warnings.push(format!(
                "r={} snr_db={}: only {count} outages in {} trials; need about {} trials for a 10% CI",
                row.r,
                row.snr_db,
                row.trials,
                if count == 0 { "many more".to_string() } else { format!("{:.0}", 100.0 / row.p_mc) },
            ));
        }
    }

    Ok(SweepOutput {
        rows,
        calibrations,
        warnings,
        config_hash: config_hash(config),
    })
}

fn calibrate_all(
    config: &SweepConfig,
    model: &ChannelModel,
    anchors_db: &[f64],
    warnings: &mut Vec<String>,
) -> Result<Vec<(f64, Calibration)>, SweepError> {
    let anchors = anchors_db
        .iter()
        .map(|&db| Snr::from_db(db))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for &r in &config.r {
        let cal = calibrate_c(
            model,
            MultiplexingGain::new(r)?,
            &anchors,
            config.trials,
            config.seed,
            config.diversity,
        )?;
        if !cal.below_boundary.is_empty() {
            warnings.push(format!(
                "r={r}: calibration anchors below the high-SNR boundary 10^(1/r): {:?}",
                cal.below_boundary
            ));
        }
        out.push((r, cal));
    }
    Ok(out)
}

fn evaluate_cell(
    config: &SweepConfig,
    model: &ChannelModel,
    label: &str,
    r_value: f64,
    snr_db: f64,
    c: Option<f64>,
) -> Result<SweepRow, SweepError> {
    let dims = model.dims();
    let r = MultiplexingGain::new(r_value)?;
    let snr = Snr::from_db(snr_db)?;
    let est = estimate_outage(model, snr, r, config.trials, config.seed)?;
    let cdf = power_gain_cdf(model)?;
    let p_low_snr = low_snr_outage(cdf.as_ref(), dims.m(), r);
    let p_low_outage_approx = if model.is_iid() {
        Some(low_outage_approx_iid(dims, r))
    } else {
        match low_outage_approx_correlated(model, r) {
            Ok(v) => Some(v),
            Err(Error::SingularCorrelation) => None,
            Err(e) => return Err(e.into()),
        }
    };
    let d_dmt = dmt(dims, r).ok().map(|p| p.d);
    let diversity = config.diversity.or(if model.is_iid() { d_dmt } else { None });
    let p_piecewise = match (c, diversity) {
        (Some(c), Some(d)) => {
            let params = PiecewiseParams::new(c, d)?;
            Some(crate::analytic::piecewise_outage(dims, r, snr, params, cdf.as_ref()))
        }
        _ => None,
    };
    let p_scalar_exact = if dims.product() == 1 && r_value <= 1.0 {
        Some(scalar_outage_exact(r, snr)?)
    } else {
        None
    };
    let gamma_high_boundary = if r_value > 0.0 && r_value <= 1.0 {
        Some(regime_boundaries(r)?.gamma_high)
    } else {
        None
    };
    Ok(SweepRow {
        model_id: label.to_string(),
        m: dims.m(),
        n: dims.n(),
        snr_db,
        gamma: snr.linear(),
        r: r_value,
        target_rate_nats: target_rate(r, snr).exact,
        p_mc: est.p_hat,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        p_low_snr,
        p_low_outage_approx,
        p_piecewise,
        p_scalar_exact,
        d_dmt,
        gamma_high_boundary,
        trials: est.trials,
        seed: est.seed,
    })
}

/// Human-readable summary of a finished sweep.
pub fn summarize(output: &SweepOutput) -> String {
    let mut s = String::new();
    let mut rs: Vec<f64> = output.rows.iter().map(|r| r.r).collect();
    rs.dedup();
    for r in rs {
        let rows: Vec<&SweepRow> = output.rows.iter().filter(|row| row.r == r).collect();
        let first = rows[0];
        let _ = writeln!(
            s,
            "r = {r}: low-SNR outage F_H(mr) = {:.6e}; MC at {} dB = {:.6e} [{:.6e}, {:.6e}]",
            first.p_low_snr, first.snr_db, first.p_mc, first.ci_low, first.ci_high
        );
        if let [.., a, b] = rows.as_slice() {
            if a.p_mc > 0.0 && b.p_mc > 0.0 {
                let slope = (b.p_mc.ln() - a.p_mc.ln()) / (b.gamma.ln() - a.gamma.ln());
                let _ = writeln!(
                    s,
                    "  log-log slope between {} and {} dB: {slope:.4} (d(r) = {})",
                    a.snr_db,
                    b.snr_db,
                    b.d_dmt.map_or("n/a".to_string(), |d| format!("{d:.4}"))
                );
            }
        }
        if let Some((_, cal)) = output.calibrations.iter().find(|(cr, _)| *cr == r) {
            let cross = PiecewiseParams::new(cal.c, cal.d)
                .ok()
                .and_then(|p| p.crossover(first.p_low_snr))
                .map_or("n/a".to_string(), |g| format!("{:.2} dB", 10.0 * g.log10()));
            let _ = writeln!(
                s,
                "  calibrated c = {:.6e} (d = {:.4}, spread {:.3}); plateau/power-law crossover at {cross}",
                cal.c, cal.d, cal.spread
            );
        }
    }
    s
}

/// Table of regime boundaries for each multiplexing gain.
pub fn boundary_report(r_list: &[f64]) -> Result<String, SweepError> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>8} {:>12} {:>10} {:>14} {:>11}",
        "r", "gamma_low", "low_dB", "gamma_high", "high_dB"
    );
    for &r in r_list {
        let b = regime_boundaries(MultiplexingGain::new(r)?)?;
        let _ = writeln!(
            s,
            "{:>8} {:>12.4e} {:>10.2} {:>14.6e} {:>11.2}",
            r,
            b.gamma_low,
            b.gamma_low_db(),
            b.gamma_high,
            b.gamma_high_db()
        );
    }
    Ok(s)
}
