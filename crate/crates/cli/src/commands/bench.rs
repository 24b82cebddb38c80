//! Benchmark sweeps: a config file describes grids over instance and
//! algorithm parameters; every cell becomes one CSV row. Completed cells are
//! recorded in a manifest so an interrupted sweep resumes where it stopped,
//! and the final CSV is written in deterministic cell order regardless of
//! scheduling.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use maxklin_core::classical::{run_amplified, RunConfig, Variant};
use maxklin_core::quench::{run_quench, QuenchConfig};
use maxklin_core::rng::derive_seed;
use maxklin_core::Instance;

use crate::output::Meta;
use crate::{qubit_limit, AppError, AppResult};

#[derive(Args)]
pub struct BenchArgs {
    /// Sweep config (JSON, see the repository docs for the schema).
    config: PathBuf,
    /// Output stem: writes <out>.csv, progress in <out>.part and
    /// <out>.manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Deserialize)]
struct SweepConfig {
    #[serde(default)]
    seed: u64,
    /// Instances per parameter tuple (fresh random seeds each).
    #[serde(default = "one")]
    trials: u64,
    instances: InstanceGrid,
    #[serde(default)]
    solve: Option<SolveGrid>,
    #[serde(default)]
    quench: Option<QuenchGrid>,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
struct InstanceGrid {
    /// antiferromagnet | cluster | regular
    kind: String,
    #[serde(default)]
    ns: Vec<usize>,
    #[serde(default)]
    ks: Vec<usize>,
    #[serde(default)]
    ds: Vec<usize>,
    /// Cluster sizes (cluster kind only).
    #[serde(default)]
    ms: Vec<usize>,
}

#[derive(Debug, Deserialize)]
struct SolveGrid {
    #[serde(default = "default_variants")]
    variants: Vec<String>,
    epsilons: Vec<f64>,
    #[serde(default)]
    ps: Vec<f64>,
    repetitions: usize,
    #[serde(default = "default_grid_points")]
    grid_points: usize,
}

fn default_variants() -> Vec<String> {
    vec!["greedy".into()]
}

fn default_grid_points() -> usize {
    10_000
}

#[derive(Debug, Deserialize)]
struct QuenchGrid {
    alphas: Vec<f64>,
    t_finals: Vec<f64>,
    #[serde(default = "default_samples")]
    sample_times: usize,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default = "default_samples")]
    n_samples: usize,
}

fn default_samples() -> usize {
    32
}

fn default_tolerance() -> f64 {
    1e-10
}

/// One unit of sweep work, identified by a stable key.
#[derive(Debug, Clone)]
struct Cell {
    key: String,
    kind: String,
    n: usize,
    k: usize,
    d: usize,
    trial: u64,
    instance_seed: u64,
    task: Task,
}

#[derive(Debug, Clone)]
enum Task {
    Solve {
        variant: String,
        epsilon: f64,
        p: Option<f64>,
        repetitions: usize,
        grid_points: usize,
        seed: u64,
    },
    Quench {
        alpha: f64,
        t_final: f64,
        sample_times: usize,
        tolerance: f64,
        n_samples: usize,
        seed: u64,
    },
}

const CSV_HEADER: &str = "key,task,kind,n,k,d,trial,variant,epsilon,p,alpha,t_final,seed,status,\
branch_a_frac,c_mean,c_max,best_energy,best_ratio,h_drift_max,balance_resid_max,hz_final,error";

fn enumerate_cells(cfg: &SweepConfig) -> AppResult<Vec<Cell>> {
    let mut tuples: Vec<(String, usize, usize, usize)> = Vec::new();
    let grid = &cfg.instances;
    match grid.kind.as_str() {
        "antiferromagnet" => {
            for &n in &grid.ns {
                tuples.push(("antiferromagnet".into(), n, 2, n.saturating_sub(1)));
            }
        }
        "cluster" => {
            for &m in &grid.ms {
                for &d in &grid.ds {
                    tuples.push(("cluster".into(), m * d, 2 * m, d.saturating_sub(1)));
                }
            }
        }
        "regular" => {
            for &n in &grid.ns {
                for &k in &grid.ks {
                    for &d in &grid.ds {
                        tuples.push(("regular".into(), n, k, d));
                    }
                }
            }
        }
        other => {
            return Err(AppError::input(format!(
                "unknown instance kind '{other}' (want antiferromagnet|cluster|regular)"
            )))
        }
    }

    let mut cells = Vec::new();
    for (tuple_idx, (kind, n, k, d)) in tuples.iter().enumerate() {
        for trial in 0..cfg.trials {
            let instance_seed = derive_seed(cfg.seed, (tuple_idx as u64) << 20 | trial);
            let base = format!("{kind}:n{n}:k{k}:d{d}:t{trial}");
            if let Some(solve) = &cfg.solve {
                for variant in &solve.variants {
                    let ps: Vec<Option<f64>> = if variant == "scaled" {
                        solve.ps.iter().map(|&p| Some(p)).collect()
                    } else {
                        vec![None]
                    };
                    for &eps in &solve.epsilons {
                        for p in &ps {
                            let key = match p {
                                Some(p) => format!("{base}:solve:{variant}:eps{eps}:p{p}"),
                                None => format!("{base}:solve:{variant}:eps{eps}"),
                            };
                            cells.push(Cell {
                                key: key.clone(),
                                kind: kind.clone(),
                                n: *n,
                                k: *k,
                                d: *d,
                                trial,
                                instance_seed,
                                task: Task::Solve {
                                    variant: variant.clone(),
                                    epsilon: eps,
                                    p: *p,
                                    repetitions: solve.repetitions,
                                    grid_points: solve.grid_points,
                                    seed: derive_seed(instance_seed, fnv(&key)),
                                },
                            });
                        }
                    }
                }
            }
            if let Some(quench) = &cfg.quench {
                for &alpha in &quench.alphas {
                    for &t_final in &quench.t_finals {
                        let key = format!("{base}:quench:a{alpha}:T{t_final}");
                        cells.push(Cell {
                            key: key.clone(),
                            kind: kind.clone(),
                            n: *n,
                            k: *k,
                            d: *d,
                            trial,
                            instance_seed,
                            task: Task::Quench {
                                alpha,
                                t_final,
                                sample_times: quench.sample_times,
                                tolerance: quench.tolerance,
                                n_samples: quench.n_samples,
                                seed: derive_seed(instance_seed, fnv(&key)),
                            },
                        });
                    }
                }
            }
        }
    }
    cells.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(cells)
}

fn fnv(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn build_instance(cell: &Cell) -> Result<Instance, maxklin_core::Error> {
    match cell.kind.as_str() {
        "antiferromagnet" => Instance::antiferromagnet(cell.n),
        "cluster" => Instance::cluster_antiferromagnet(cell.k / 2, cell.d + 1),
        _ => Instance::random_regular(cell.n, cell.k, cell.d, cell.instance_seed),
    }
}

/// Run one cell to a finished CSV row.
fn run_cell(cell: &Cell) -> String {
    let fixed = |task: &str,
                 variant: &str,
                 eps: String,
                 p: String,
                 alpha: String,
                 tf: String,
                 seed: u64| {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            cell.key,
            task,
            cell.kind,
            cell.n,
            cell.k,
            cell.d,
            cell.trial,
            variant,
            eps,
            p,
            alpha,
            tf,
            seed
        )
    };
    match &cell.task {
        Task::Solve {
            variant,
            epsilon,
            p,
            repetitions,
            grid_points,
            seed,
        } => {
            let prefix = fixed(
                "solve",
                variant,
                epsilon.to_string(),
                p.map(|v| v.to_string()).unwrap_or_default(),
                String::new(),
                String::new(),
                *seed,
            );
            let go = || -> Result<String, maxklin_core::Error> {
                let inst = build_instance(cell)?;
                let config = RunConfig {
                    variant: match variant.as_str() {
                        "greedy" => Variant::Greedy,
                        _ => Variant::Scaled {
                            p: p.unwrap_or(0.5),
                        },
                    },
                    epsilon: *epsilon,
                    repetitions: *repetitions,
                    grid_points: *grid_points,
                    seed: *seed,
                };
                let amp = run_amplified(&inst, &config)?;
                let best = amp.best();
                Ok(format!(
                    "ok,{},{},{},{},{},,,,",
                    amp.branch_a_count as f64 / amp.reports.len() as f64,
                    amp.c_summary.mean,
                    amp.c_summary.max,
                    best.rounded_energy,
                    best.rounded_energy as f64 / inst.num_terms() as f64,
                ))
            };
            match go() {
                Ok(metrics) => format!("{prefix},{metrics}"),
                Err(e) => format!("{prefix},error,,,,,,,,,\"{}\"", csv_escape(&e.to_string())),
            }
        }
        Task::Quench {
            alpha,
            t_final,
            sample_times,
            tolerance,
            n_samples,
            seed,
        } => {
            let prefix = fixed(
                "quench",
                "",
                String::new(),
                String::new(),
                alpha.to_string(),
                t_final.to_string(),
                *seed,
            );
            let go = || -> Result<String, maxklin_core::Error> {
                let inst = build_instance(cell)?;
                let mut config = QuenchConfig::new(*alpha, *t_final, *seed);
                config.sample_times = (1..=*sample_times)
                    .map(|j| t_final * j as f64 / *sample_times as f64)
                    .collect();
                config.tolerance = *tolerance;
                config.n_samples = *n_samples;
                let trace = run_quench(&inst, &config, qubit_limit())?;
                let n = inst.n() as f64;
                let drift = trace
                    .rows
                    .iter()
                    .map(|r| (r.h - n).abs())
                    .fold(0.0f64, f64::max);
                let balance = trace
                    .rows
                    .iter()
                    .map(|r| (r.hz - inst.d() as f64 * (n - r.x) / alpha).abs())
                    .fold(0.0f64, f64::max);
                let hz_final = trace.rows.last().map(|r| r.hz).unwrap_or(0.0);
                Ok(format!("ok,,,,,,{drift},{balance},{hz_final},"))
            };
            match go() {
                Ok(metrics) => format!("{prefix},{metrics}"),
                Err(e) => format!("{prefix},error,,,,,,,,,\"{}\"", csv_escape(&e.to_string())),
            }
        }
    }
}

fn csv_escape(s: &str) -> String {
    s.replace('"', "'").replace(',', ";").replace('\n', " ")
}

pub fn run(args: BenchArgs) -> AppResult<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| AppError::input(format!("read {}: {e}", args.config.display())))?;
    let cfg: SweepConfig =
        serde_json::from_str(&text).map_err(|e| AppError::input(format!("sweep config: {e}")))?;
    let cells = enumerate_cells(&cfg)?;

    let manifest_path = args.out.with_extension("manifest");
    let part_path = args.out.with_extension("part");
    let csv_path = args.out.with_extension("csv");

    // resume: rows of completed cells live in the .part file
    let mut done: BTreeMap<String, String> = BTreeMap::new();
    if manifest_path.exists() && part_path.exists() {
        let completed: std::collections::BTreeSet<String> = std::fs::read_to_string(&manifest_path)
            .map_err(|e| AppError::internal(e.to_string()))?
            .lines()
            .map(str::to_string)
            .collect();
        for line in std::fs::read_to_string(&part_path)
            .map_err(|e| AppError::internal(e.to_string()))?
            .lines()
        {
            if let Some(key) = line.split(',').next() {
                if completed.contains(key) {
                    done.insert(key.to_string(), line.to_string());
                }
            }
        }
    }

    let pending: Vec<&Cell> = cells
        .iter()
        .filter(|c| !done.contains_key(&c.key))
        .collect();
    println!(
        "{} cells total, {} already complete, {} to run",
        cells.len(),
        done.len(),
        pending.len()
    );

    let fresh: Vec<(String, String)> = pending
        .par_iter()
        .map(|cell| (cell.key.clone(), run_cell(cell)))
        .collect();

    {
        // append progress so an interrupt can resume
        let mut part = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&part_path)
            .map_err(|e| AppError::internal(e.to_string()))?;
        let mut manifest = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&manifest_path)
            .map_err(|e| AppError::internal(e.to_string()))?;
        for (key, row) in &fresh {
            writeln!(part, "{row}").map_err(|e| AppError::internal(e.to_string()))?;
            writeln!(manifest, "{key}").map_err(|e| AppError::internal(e.to_string()))?;
            println!("cell {key} done");
        }
    }
    for (key, row) in fresh {
        done.insert(key, row);
    }

    // final CSV in deterministic (sorted-key) order
    let meta = Meta::new(
        "bench",
        "-",
        cfg.seed,
        json!({ "config": args.config.display().to_string(), "cells": cells.len() }),
    );
    let rows: Vec<String> = cells
        .iter()
        .map(|c| done.get(&c.key).cloned().unwrap_or_default())
        .collect();
    crate::output::write_csv(&csv_path, &meta, CSV_HEADER, &rows)?;
    let failed = rows.iter().filter(|r| r.contains(",error,")).count();
    println!(
        "wrote {} ({} rows, {failed} failed)",
        csv_path.display(),
        rows.len()
    );
    if failed > 0 {
        return Err(AppError::internal(format!("{failed} cells failed")));
    }
    Ok(())
}
