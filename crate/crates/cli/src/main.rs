//! `teq`: turbo-equalization BER sweeps, plots and AWGN calibration.

mod config;
mod plot;
mod results;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use teq_core::sim::{calibrate_uncoded, run_sweep_with, Execution, MIN_CALIBRATION_BITS};

use config::ConfigFile;

#[derive(Parser)]
#[command(name = "teq", version, about = "MMSE turbo equalization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER sweep and write results.csv plus manifest.toml.
    Sweep {
        /// Config file (TOML). A previous manifest.toml works too.
        #[arg(short, long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
        /// Extra `section.key=value` settings applied after the file.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
    },
    /// Plot BER curves from a results CSV.
    Plot {
        results: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare uncoded QPSK over AWGN with the closed-form BER.
    Calibrate {
        /// Comma-separated Eb/N0 values in dB.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,2,4")]
        ebn0: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        bits: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep {
            config,
            seed,
            threads,
            output,
            set,
        } => sweep(&config, seed, threads, &output, &set),
        Command::Plot { results, output } => plot_cmd(&results, &output),
        Command::Calibrate { ebn0, bits, seed } => calibrate(&ebn0, bits, seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn sweep(
    path: &Path,
    seed: Option<u64>,
    threads: Option<usize>,
    out_dir: &Path,
    set: &[String],
) -> Result<()> {
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut overrides = set.to_vec();
    if let Some(s) = seed {
        overrides.push(format!("sim.seed={s}"));
    }
    let file = ConfigFile::parse(&text, &overrides)
        .with_context(|| format!("in {}", path.display()))?;
    let sim = file.to_sim().with_context(|| format!("in {}", path.display()))?;
    let canonical = file.canonical();
    let run_id = run_id(&canonical);

    let records = run_sweep_with(&sim, Execution { threads })?;

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let csv_path = out_dir.join("results.csv");
    let manifest_path = out_dir.join("manifest.toml");
    let mut buf = Vec::new();
    results::write_csv(&mut buf, &run_id, &records)?;
    fs::write(&csv_path, buf).with_context(|| format!("writing {}", csv_path.display()))?;
    let manifest = manifest(&canonical, &run_id, sim.seed, &csv_path);
    fs::write(&manifest_path, manifest)
        .with_context(|| format!("writing {}", manifest_path.display()))?;

    println!(
        "run {run_id}: {} rows -> {}, {}",
        records.len(),
        csv_path.display(),
        manifest_path.display()
    );
    Ok(())
}

/// First 12 hex digits of SHA-256 over the canonical config.
fn run_id(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(6)
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn manifest(canonical: &str, run_id: &str, seed: u64, csv: &Path) -> String {
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut run = Table::new();
    run.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    run.insert("run_id".into(), Value::String(run_id.into()));
    run.insert(
        "seed".into(),
        i64::try_from(seed).map_or_else(|_| Value::String(seed.to_string()), Value::Integer),
    );
    run.insert("created_unix".into(), Value::Integer(unix as i64));
    run.insert("results".into(), Value::String(csv.display().to_string()));
    let mut wrapper = Table::new();
    wrapper.insert("run".into(), Value::Table(run));
    format!(
        "# Rerun with: teq sweep -c manifest.toml\n{canonical}\n{}",
        toml::to_string(&wrapper).expect("run table serializes")
    )
}

fn plot_cmd(input: &Path, output: &Path) -> Result<()> {
    let file = fs::File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let rows = results::read_csv(file).with_context(|| format!("in {}", input.display()))?;
    let svg = plot::render_svg(&rows)?;
    fs::write(output, svg).with_context(|| format!("writing {}", output.display()))?;
    println!("{} rows -> {}", rows.len(), output.display());
    Ok(())
}

fn calibrate(ebn0: &[f64], bits: u64, seed: u64) -> Result<()> {
    if bits < MIN_CALIBRATION_BITS {
        bail!("--bits must be at least {MIN_CALIBRATION_BITS} (got {bits})");
    }
    if ebn0.is_empty() {
        bail!("--ebn0 needs at least one value");
    }
    println!(
        "{:>8} {:>10} {:>8} {:>14} {:>14} {:>12} {:>8}",
        "ebn0_db", "bits", "errors", "measured", "theory", "mc_sigma", "dev/sig"
    );
    let mut worst = 0.0f64;
    for &e in ebn0 {
        let p = calibrate_uncoded(e, bits, seed)?;
        let dev = p.deviation_sigmas();
        worst = worst.max(dev);
        println!(
            "{:>8.3} {:>10} {:>8} {:>14.6e} {:>14.6e} {:>12.3e} {:>8.2}",
            p.ebn0_db, p.bits, p.errors, p.measured, p.theory, p.mc_sigma, dev
        );
    }
    println!("worst deviation: {worst:.2} sigma");
    Ok(())
}
