use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use maxklin_core::classical::{run_amplified, RunConfig, Variant};
use maxklin_core::polycombine::Branch;

use crate::output::{write_csv, write_json, Meta};
use crate::{commands::load_instance, AppError, AppResult};

#[derive(Args)]
pub struct SolveArgs {
    /// Instance file (canonical JSON).
    instance: PathBuf,
    #[arg(long, value_parser = ["greedy", "scaled"], default_value = "greedy")]
    variant: String,
    #[arg(long)]
    epsilon: f64,
    /// Force scale for the scaled variant, in (0, 1].
    #[arg(long)]
    p: Option<f64>,
    /// Repetitions; defaults to d^2 capped at 10^4.
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output stem: writes <out>.csv (one row per repetition) and
    /// <out>.best.json (the best report).
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: SolveArgs) -> AppResult<()> {
    let inst = load_instance(&args.instance)?;
    let variant = match args.variant.as_str() {
        "greedy" => Variant::Greedy,
        _ => Variant::Scaled {
            p: args
                .p
                .ok_or_else(|| AppError::input("scaled variant needs --p"))?,
        },
    };
    let config = RunConfig {
        variant,
        epsilon: args.epsilon,
        repetitions: args
            .repetitions
            .unwrap_or_else(|| (inst.d() * inst.d()).clamp(1, 10_000)),
        grid_points: args.grid_points,
        seed: args.seed,
    };
    let amp = run_amplified(&inst, &config)?;

    let params = json!({
        "variant": args.variant,
        "epsilon": args.epsilon,
        "p": args.p,
        "repetitions": config.repetitions,
        "grid_points": args.grid_points,
    });
    let meta = Meta::new("solve", &inst.content_hash(), args.seed, params);

    let rows: Vec<String> = amp
        .reports
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.seed, r.branch, r.c, r.hz_w2, r.hz_u, r.rounded_energy
            )
        })
        .collect();
    let csv_path = args.out.with_extension("csv");
    write_csv(
        &csv_path,
        &meta,
        "seed,branch,C,hz_w2,hz_u,rounded_energy",
        &rows,
    )?;
    let best_path = args.out.with_extension("best.json");
    write_json(&best_path, &meta, &amp.best())?;

    let n_t = inst.num_terms() as f64;
    let best = amp.best();
    println!(
        "repetitions={} branchA={} branchB={} best_energy={} (ratio {:.6}) improvement_ratio={:.6}",
        amp.reports.len(),
        amp.branch_a_count,
        amp.branch_b_count,
        best.rounded_energy,
        best.rounded_energy as f64 / n_t,
        best.improvement_ratio
    );
    println!(
        "C: mean={:.3} max={:.3}  rounded_energy: mean={:.3} max={}",
        amp.c_summary.mean, amp.c_summary.max, amp.energy_summary.mean, amp.energy_summary.max
    );
    let b_reports: Vec<f64> = amp
        .reports
        .iter()
        .filter(|r| r.branch == Branch::B)
        .map(|r| r.hz_u)
        .collect();
    if !b_reports.is_empty() {
        let min = b_reports.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "branch B hz_u: min={min:.3} ({} runs); most negative ratio {:.4}",
            b_reports.len(),
            min / n_t
        );
    }
    println!("wrote {} and {}", csv_path.display(), best_path.display());
    Ok(())
}
