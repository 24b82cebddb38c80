use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;

use maxklin_core::oracle::{
    brute_force_optimum, force_moment_stats, random_model_extremes, tail_threshold,
    ForceDistribution, ForceMode, DEFAULT_BRUTE_FORCE_LIMIT,
};

use crate::output::{write_csv, write_json, Meta};
use crate::{commands::load_instance, AppResult};

#[derive(Args)]
pub struct OracleArgs {
    /// Instance file (canonical JSON).
    instance: PathBuf,
    #[command(subcommand)]
    task: OracleTask,
}

#[derive(Clone, Copy)]
enum Format {
    Json,
    Csv,
}

fn parse_format(s: &str) -> Format {
    match s {
        "csv" => Format::Csv,
        _ => Format::Json,
    }
}

#[derive(Subcommand)]
enum OracleTask {
    /// Exhaustive spectrum: optimum, pessimum, histogram.
    Optimum {
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_LIMIT)]
        limit: usize,
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Force moments and tail frequencies on one spin.
    Forces {
        #[arg(long, default_value_t = 0)]
        spin: usize,
        #[arg(long, value_parser = ["exact", "sampled"], default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// masked: the solver's S-masked distribution; uniform: plain signs.
        #[arg(long, value_parser = ["masked", "uniform"], default_value = "masked")]
        distribution: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantiles of max |H| over random-sign resamplings of the instance.
    Extremes {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_LIMIT)]
        limit: usize,
        #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(args: OracleArgs) -> AppResult<()> {
    let inst = load_instance(&args.instance)?;
    let hash = inst.content_hash();
    match args.task {
        OracleTask::Optimum { limit, format, out } => {
            let summary = brute_force_optimum(&inst, limit)?;
            let meta = Meta::new(
                "oracle-optimum",
                &hash,
                0,
                json!({
                    "limit": limit,
                    "max": summary.max_energy,
                    "min": summary.min_energy,
                }),
            );
            match parse_format(&format) {
                Format::Json => write_json(&out, &meta, &summary)?,
                Format::Csv => {
                    let rows: Vec<String> = summary
                        .histogram
                        .iter()
                        .map(|(e, c)| format!("{e},{c}"))
                        .collect();
                    write_csv(&out, &meta, "energy,count", &rows)?;
                }
            }
            println!(
                "max={} min={} distinct_energies={} -> {}",
                summary.max_energy,
                summary.min_energy,
                summary.histogram.len(),
                out.display()
            );
        }
        OracleTask::Forces {
            spin,
            mode,
            trials,
            distribution,
            seed,
            format,
            out,
        } => {
            let fmode = match mode.as_str() {
                "exact" => ForceMode::Exact,
                _ => ForceMode::Sampled { trials, seed },
            };
            let dist = match distribution.as_str() {
                "masked" => ForceDistribution::HalfMasked,
                _ => ForceDistribution::Uniform,
            };
            let thresholds = [1.0, 2.0, 4.0, tail_threshold(inst.k())];
            let moments = force_moment_stats(&inst, spin, fmode, dist, &thresholds)?;
            let meta = Meta::new(
                "oracle-forces",
                &hash,
                seed,
                json!({
                    "spin": spin, "mode": mode, "trials": trials,
                    "distribution": distribution,
                    "mean_sq": moments.mean_sq, "mean_abs": moments.mean_abs,
                }),
            );
            match parse_format(&format) {
                Format::Json => write_json(&out, &meta, &moments)?,
                Format::Csv => {
                    let rows: Vec<String> = moments
                        .tail_table
                        .iter()
                        .map(|(t, p)| format!("{t},{p}"))
                        .collect();
                    write_csv(&out, &meta, "threshold,tail_probability", &rows)?;
                }
            }
            println!(
                "spin={spin} E[F^2]={:.6} E[|F|]={:.6} -> {}",
                moments.mean_sq,
                moments.mean_abs,
                out.display()
            );
        }
        OracleTask::Extremes {
            trials,
            seed,
            limit,
            format,
            out,
        } => {
            let report = random_model_extremes(&inst, trials, seed, limit)?;
            let meta = Meta::new(
                "oracle-extremes",
                &hash,
                seed,
                json!({ "trials": trials, "limit": limit }),
            );
            match parse_format(&format) {
                Format::Json => write_json(&out, &meta, &report)?,
                Format::Csv => {
                    let rows: Vec<String> = report
                        .max_abs
                        .iter()
                        .zip(&report.normalized)
                        .enumerate()
                        .map(|(rank, (m, norm))| format!("{rank},{m},{norm}"))
                        .collect();
                    write_csv(&out, &meta, "rank,max_abs,normalized", &rows)?;
                }
            }
            println!(
                "trials={trials} q50={:.4} q90={:.4} q99={:.4} (max|H| / n sqrt(d)) -> {}",
                report.quantile(0.5),
                report.quantile(0.9),
                report.quantile(0.99),
                out.display()
            );
        }
    }
    Ok(())
}
