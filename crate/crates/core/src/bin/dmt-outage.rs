use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use dmt_outage::analytic::{
    low_outage_approx_correlated, low_outage_approx_iid, low_snr_outage, power_gain_cdf,
    scalar_outage_exact,
};
use dmt_outage::montecarlo::{calibrate_c, estimate_outage};
use dmt_outage::sweep::{self, CMode, SweepConfig};
use dmt_outage::{ChannelDims, ChannelModel, CorrelationModel, MultiplexingGain, Snr};

#[derive(Parser)]
#[command(name = "dmt-outage", version, about = "Low-SNR MIMO outage: closed forms and Monte Carlo")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "DMT_OUTAGE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured (SNR, r) sweep and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (default: the config's `output`, else standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the low/high SNR regime boundaries of the scalar channel.
    Boundary {
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
    },
    /// Fit the high-SNR constant c for every r in a config.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Single-cell Monte Carlo estimate.
    Mc {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Exponential transmit correlation (Kronecker model).
        #[arg(long)]
        rho_tx: Option<f64>,
        /// Exponential receive correlation (Kronecker model).
        #[arg(long)]
        rho_rx: Option<f64>,
    },
}

type CliResult = Result<(), String>;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Sweep { config, out, seed } => run_sweep(config, out, seed),
        Command::Boundary { r } => sweep::boundary_report(&r)
            .map(|table| print!("{table}"))
            .map_err(fail),
        Command::Calibrate { config, seed } => run_calibrate(config, seed),
        Command::Mc {
            m,
            n,
            snr_db,
            r,
            trials,
            seed,
            rho_tx,
            rho_rx,
        } => run_mc(m, n, snr_db, r, trials, seed, rho_tx, rho_rx),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<(SweepConfig, PathBuf), String> {
    let (mut config, base) = SweepConfig::from_file(path).map_err(fail)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config.validate().map_err(fail)?;
    Ok((config, base))
}

fn run_sweep(path: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> CliResult {
    let (config, base) = load(&path, seed)?;
    let output = sweep::run_sweep(&config, &base).map_err(fail)?;
    for w in &output.warnings {
        eprintln!("warning: {w}");
    }
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let comment = format!(
        "dmt-outage sweep config_sha256={} seed={} generated_unix={stamp}",
        output.config_hash, config.seed
    );
    let target = out.or_else(|| config.output.as_ref().map(|p| base.join(p)));
    match &target {
        Some(p) => {
            let file = File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            sweep::write_csv(BufWriter::new(file), &output.rows, Some(&comment)).map_err(fail)?;
            print!("{}", sweep::summarize(&output));
            println!("wrote {} rows to {}", output.rows.len(), p.display());
        }
        None => {
            sweep::write_csv(io::stdout().lock(), &output.rows, Some(&comment)).map_err(fail)?;
            eprint!("{}", sweep::summarize(&output));
        }
    }
    Ok(())
}

fn run_calibrate(path: PathBuf, seed: Option<u64>) -> CliResult {
    let (config, base) = load(&path, seed)?;
    let model = config.build_model(&base).map_err(fail)?;
    let anchors_db = match &config.c_mode {
        CMode::Calibrate { anchors_db } => anchors_db.clone(),
        _ => {
            let pts = config.snr_db.points();
            pts[pts.len().saturating_sub(2)..].to_vec()
        }
    };
    let anchors = anchors_db
        .iter()
        .map(|&db| Snr::from_db(db))
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    println!("r,c,d,spread,anchors_db");
    for &r in &config.r {
        let gain = MultiplexingGain::new(r).map_err(fail)?;
        let cal = calibrate_c(&model, gain, &anchors, config.trials, config.seed, config.diversity)
            .map_err(fail)?;
        if !cal.below_boundary.is_empty() {
            eprintln!(
                "warning: r={r}: anchors below the high-SNR boundary: {:?}",
                cal.below_boundary
            );
        }
        let joined: Vec<String> = anchors_db.iter().map(|a| a.to_string()).collect();
        println!("{r},{:.8e},{},{:.6},{}", cal.c, cal.d, cal.spread, joined.join(";"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_mc(
    m: usize,
    n: usize,
    snr_db: f64,
    r: f64,
    trials: u64,
    seed: u64,
    rho_tx: Option<f64>,
    rho_rx: Option<f64>,
) -> CliResult {
    let dims = ChannelDims::new(m, n).map_err(fail)?;
    let correlation = if rho_tx.is_some() || rho_rx.is_some() {
        CorrelationModel::exponential_kronecker(dims, rho_tx.unwrap_or(0.0), rho_rx.unwrap_or(0.0))
            .map_err(fail)?
    } else {
        CorrelationModel::Iid
    };
    let model = ChannelModel::new(dims, correlation).map_err(fail)?;
    let snr = Snr::from_db(snr_db).map_err(fail)?;
    let gain = MultiplexingGain::new(r).map_err(fail)?;
    let est = estimate_outage(&model, snr, gain, trials, seed).map_err(fail)?;
    println!(
        "p_mc = {:.8e}  95% CI [{:.8e}, {:.8e}]  ({} outages / {} trials, seed {})",
        est.p_hat, est.ci_low, est.ci_high, est.outage_count, est.trials, est.seed
    );
    let cdf = power_gain_cdf(&model).map_err(fail)?;
    println!("low-SNR closed form F_H(mr) = {:.8e}", low_snr_outage(cdf.as_ref(), m, gain));
    let approx = if model.is_iid() {
        Ok(low_outage_approx_iid(dims, gain))
    } else {
        low_outage_approx_correlated(&model, gain)
    };
    match approx {
        Ok(v) => println!("low-outage approximation = {v:.8e}"),
        Err(e) => println!("low-outage approximation unavailable: {e}"),
    }
    if dims.product() == 1 && r <= 1.0 {
        let exact = scalar_outage_exact(gain, snr).map_err(fail)?;
        println!("scalar exact outage = {exact:.8e}");
    }
    if est.outage_count < 100 && est.outage_count < trials {
        eprintln!("warning: fewer than 100 outages; the relative CI half-width exceeds ~20%");
    }
    Ok(())
}
