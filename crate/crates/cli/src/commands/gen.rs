use std::path::PathBuf;

use clap::{Args, Subcommand};

use maxklin_core::Instance;

use crate::{AppError, AppResult};

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Complete pair antiferromagnet on n spins (k = 2, all pairs -1).
    Antiferromagnet {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Clustered antiferromagnet: d clusters of m spins, k = 2m.
    Cluster {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random k-uniform d-regular instance with uniform signs.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn run(args: GenArgs) -> AppResult<()> {
    let (inst, out) = match args.kind {
        GenKind::Antiferromagnet { n, out } => (Instance::antiferromagnet(n)?, out),
        GenKind::Cluster { m, d, out } => (Instance::cluster_antiferromagnet(m, d)?, out),
        GenKind::Regular { n, k, d, seed, out } => (Instance::random_regular(n, k, d, seed)?, out),
    };
    inst.write_file(&out)
        .map_err(|e| AppError::internal(format!("write {}: {e}", out.display())))?;
    println!(
        "n={} k={} d={} terms={} regular={} hash={} -> {}",
        inst.n(),
        inst.k(),
        inst.d(),
        inst.num_terms(),
        inst.is_regular(),
        inst.content_hash(),
        out.display()
    );
    Ok(())
}
