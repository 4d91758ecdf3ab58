use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crbm::bench::{persist_results, run_benchmark, Method, DEFAULT_CRBM_ROUNDS};
use crbm::criterion::{estimation_capacity, gamma, GridSpec};
use crbm::data::{gen_simlin, load_pairs, read_pair_file, write_pairs, DatasetTag, SimLinSpec};
use crbm::rbm::{EncoderScaling, RbmParams};
use crbm::regularizer::{Coord, RangeBox};
use crbm::trainer::train_pair_oriented;

mod config;

use config::Settings;

/// Significant digits kept when a model is saved.
const SAVE_DIGITS: u32 = 6;

/// Exit status of a benchmark that finished with failed pairs.
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(name = "crbm", version, about = "Cause-effect direction from RBM mode placement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the linear simulated dataset.
    GenSimlin {
        #[arg(long, default_value_t = 100)]
        n_pairs: usize,
        #[arg(long, default_value_t = 1000)]
        n_obs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "simlin")]
        out: PathBuf,
    },
    /// Train one model on a two-column pair file and report the decision.
    TrainPair {
        file: PathBuf,
        /// Exchange the columns; the initial weights are mirrored as well.
        #[arg(long)]
        swap: bool,
        /// Write the trained model as JSON.
        #[arg(long, value_name = "FILE")]
        save: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Score every pair of a dataset and write results.json and roc.csv.
    Bench {
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Estimation capacity of a saved model along both coordinates.
    Capacity {
        model: PathBuf,
        #[arg(long, default_value_t = GridSpec::default().nodes)]
        nodes: usize,
        #[arg(long, default_value_t = GridSpec::default().pad_sigmas)]
        pad_sigmas: f64,
    },
}

/// What `train-pair --save` writes.
#[derive(Debug, Serialize, Deserialize)]
struct SavedModel {
    encoder_scaling: EncoderScaling,
    params: RbmParams,
    ranges: RangeBox,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenSimlin {
            n_pairs,
            n_obs,
            seed,
            out,
        } => gen(n_pairs, n_obs, seed, &out),
        Command::TrainPair {
            file,
            swap,
            save,
            settings,
        } => train(&file, swap, save.as_deref(), &settings.resolve()?),
        Command::Bench {
            data,
            out,
            settings,
        } => bench(&data, &out, &settings.resolve()?),
        Command::Capacity {
            model,
            nodes,
            pad_sigmas,
        } => capacity(&model, GridSpec { nodes, pad_sigmas }),
    }
}

fn gen(n_pairs: usize, n_obs: usize, seed: u64, out: &Path) -> Result<ExitCode> {
    anyhow::ensure!(n_pairs > 0 && n_obs >= 2, "need at least 1 pair of at least 2 observations");
    let pairs = gen_simlin(&SimLinSpec {
        n_pairs,
        n_obs,
        seed,
    });
    write_pairs(out, &pairs)?;
    println!("wrote {n_pairs} pairs to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn capacities(params: &RbmParams, ranges: &RangeBox, grid: GridSpec) -> Result<(f64, f64)> {
    Ok((
        estimation_capacity(params, Coord::X, ranges, grid)?,
        estimation_capacity(params, Coord::Y, ranges, grid)?,
    ))
}

fn train(file: &Path, swap: bool, save: Option<&Path>, settings: &Settings) -> Result<ExitCode> {
    let tag = settings.dataset_tag(DatasetTag::Cep)?;
    let config = settings.train_config(tag)?;
    let (x, y) = read_pair_file(file)?;
    let fit = train_pair_oriented(&x, &y, &config, swap)?;
    let result = &fit.result;
    let d = &fit.decision;
    let (cap_x, cap_y) = capacities(&result.params, &result.ranges, GridSpec::default())?;

    println!("gamma: {}", d.gamma);
    println!("d_x: {}", d.d_x);
    println!("d_y: {}", d.d_y);
    println!("decision: {}", d.direction);
    println!("recon_error: {}", result.recon_error);
    println!("capacity_x: {cap_x}");
    println!("capacity_y: {cap_y}");
    println!("epochs: {}", result.epochs_run);
    let final_reg = result.loss_trace.last().map_or(0.0, |l| l.reg);
    println!("final_reg: {final_reg}");

    if let Some(path) = save {
        let model = SavedModel {
            encoder_scaling: config.encoder_scaling,
            params: result.params.truncated(SAVE_DIGITS),
            ranges: result.ranges,
        };
        let json = serde_json::to_string_pretty(&model)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(data: &Path, out: &Path, settings: &Settings) -> Result<ExitCode> {
    let tag = settings.dataset_tag(DatasetTag::Cep)?;
    let config = settings.train_config(tag)?;
    let method = Method::parse(settings.method.as_deref().unwrap_or("crbm"), config)?;
    let rounds = settings.rounds.unwrap_or(DEFAULT_CRBM_ROUNDS);
    let base_seed = settings.base_seed.unwrap_or(0);

    let loaded = load_pairs(data, tag).with_context(|| format!("loading {}", data.display()))?;
    for err in &loaded.skipped {
        eprintln!("skipped: {err}");
    }
    anyhow::ensure!(!loaded.pairs.is_empty(), "no usable pairs in {}", data.display());

    let report = run_benchmark(&loaded.pairs, &method, tag, rounds, base_seed)?;
    persist_results(&report, out)?;
    println!("{}", report.summary.summary_line());

    let failures = report.summary.failures;
    if failures > 0 {
        for r in report.records.iter().filter(|r| r.diagnostic.is_some()) {
            eprintln!("failed: {} round {}: {}", r.pair_id, r.round, r.diagnostic.as_deref().unwrap_or(""));
        }
        eprintln!("{failures} task(s) failed; results in {} are partial", out.display());
        return Ok(ExitCode::from(EXIT_PARTIAL));
    }
    Ok(ExitCode::SUCCESS)
}

fn capacity(path: &Path, grid: GridSpec) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let model: SavedModel =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    model.params.validate()?;
    let (cap_x, cap_y) = capacities(&model.params, &model.ranges, grid)?;
    let d = gamma(&model.params, &model.ranges)?;
    println!("m: {}", model.params.m());
    println!("capacity_x: {cap_x}");
    println!("capacity_y: {cap_y}");
    println!("gamma: {}", d.gamma);
    println!("decision: {}", d.direction);
    Ok(ExitCode::SUCCESS)
}
