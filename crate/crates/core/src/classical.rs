//! The randomized classical solver.
//!
//! One run samples a half-density set S, draws uniform signs off S, fills S
//! either greedily (sign of the force) or with scaled forces clipped to
//! [-1,1], and feeds the resulting disjoint-support pair (w1, w2) to the
//! improve-or-witness dichotomy. Amplification repeats with derived seeds
//! and keeps the best rounded assignment, flipping all spins for odd k when
//! that helps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{round_randomized, Assignment, FractionalAssignment, Instance};
use crate::polycombine::{combine_dichotomy, Branch, CombineOutcome};
use crate::rng::{self, derive_seed, rng_from_seed};

/// Which step rule fills w1 on S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Variant {
    /// (w1)_i = sign F_i(w2), ties to +1.
    Greedy,
    /// (w1)_i = p*F_i(w2)/sqrt(d), clipped to [-1, 1].
    Scaled { p: f64 },
}

/// Configuration of a solver run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub variant: Variant,
    pub epsilon: f64,
    pub repetitions: usize,
    pub grid_points: usize,
    pub seed: u64,
}

impl RunConfig {
    /// Defaults: greedy variant, repetitions = d^2 capped at 10^4,
    /// 10^4 grid points.
    pub fn new(inst: &Instance, epsilon: f64, seed: u64) -> Self {
        RunConfig {
            variant: Variant::Greedy,
            epsilon,
            repetitions: (inst.d * inst.d).clamp(1, 10_000),
            grid_points: 10_000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::Input(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if let Variant::Scaled { p } = self.variant {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Input(format!("p must lie in (0, 1], got {p}")));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::Input("repetitions must be >= 1".into()));
        }
        Ok(())
    }
}

/// One sampled step: the set S, the disjoint-support pair, and the constant
/// C = sum_{i in S} F_i(w2) (w1)_i.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub s: Vec<bool>,
    pub w1: FractionalAssignment,
    pub w2: FractionalAssignment,
    pub c: f64,
}

fn sample_s_and_w2(inst: &Instance, rng: &mut rng::Rng) -> (Vec<bool>, FractionalAssignment) {
    let s: Vec<bool> = (0..inst.n).map(|_| rng::bernoulli(rng, 0.5)).collect();
    let w2 = FractionalAssignment {
        values: (0..inst.n)
            .map(|i| {
                if s[i] {
                    0.0
                } else {
                    rng::uniform_sign(rng) as f64
                }
            })
            .collect(),
    };
    (s, w2)
}

/// Greedy step: w1 = sign of the force on S (ties to +1), C = sum |F_i|.
pub fn greedy_step(inst: &Instance, seed: u64) -> StepOutput {
    let mut rng = rng_from_seed(seed);
    let (s, w2) = sample_s_and_w2(inst, &mut rng);
    let mut w1 = vec![0.0; inst.n];
    let mut c = 0.0;
    for i in 0..inst.n {
        if !s[i] {
            continue;
        }
        let f = inst.force_unchecked(&w2.values, i);
        w1[i] = if f < 0.0 { -1.0 } else { 1.0 };
        c += f.abs();
    }
    StepOutput {
        s,
        w1: FractionalAssignment { values: w1 },
        w2,
        c,
    }
}

/// Scaled step: w1 = p*F/sqrt(d) on S, clipped; C = sum F_i (w1)_i >= 0.
pub fn scaled_step(inst: &Instance, p: f64, seed: u64) -> StepOutput {
    let mut rng = rng_from_seed(seed);
    let (s, w2) = sample_s_and_w2(inst, &mut rng);
    let scale = p / (inst.d as f64).sqrt();
    let mut w1 = vec![0.0; inst.n];
    let mut c = 0.0;
    for i in 0..inst.n {
        if !s[i] {
            continue;
        }
        let f = inst.force_unchecked(&w2.values, i);
        w1[i] = (scale * f).clamp(-1.0, 1.0);
        c += f * w1[i];
    }
    StepOutput {
        s,
        w1: FractionalAssignment { values: w1 },
        w2,
        c,
    }
}

/// Outcome record of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub branch: Branch,
    /// The constant C = sum_{i in S} F_i (w1)_i from the step.
    pub c: f64,
    /// Baseline H(w2) (multilinear; w2 is zero on S).
    pub hz_w2: f64,
    /// Fractional objective at the combined vector u.
    pub hz_u: f64,
    /// Integer objective of the rounded assignment.
    pub rounded_energy: i64,
    pub rounded: Assignment,
    pub s_size: usize,
    /// hz_u / N_T.
    pub improvement_ratio: f64,
    pub seed: u64,
    /// Set when odd-k normalization flipped the rounded assignment.
    pub flipped: bool,
    /// Witnessed coefficient index for branch B.
    pub witness_index: Option<usize>,
    /// Certified lower bound on |hz_u| for branch B.
    pub witness_bound: Option<f64>,
}

const DEGENERATE_RETRY_CAP: usize = 64;

/// One full run: step, dichotomy, randomized rounding. Degenerate steps
/// (C <= 0, e.g. an empty S) are resampled internally up to a cap.
pub fn run_once(inst: &Instance, config: &RunConfig) -> Result<DualityReport> {
    config.validate()?;
    let mut seed = config.seed;
    for _ in 0..DEGENERATE_RETRY_CAP {
        let step = match config.variant {
            Variant::Greedy => greedy_step(inst, seed),
            Variant::Scaled { p } => scaled_step(inst, p, seed),
        };
        if step.c <= 0.0 {
            seed = derive_seed(seed, 0x5eed);
            continue;
        }
        let outcome =
            match combine_dichotomy(inst, &step.w1, &step.w2, config.epsilon, config.grid_points) {
                Ok(o) => o,
                Err(Error::Degenerate(_)) => {
                    seed = derive_seed(seed, 0x5eed);
                    continue;
                }
                Err(e) => return Err(e),
            };
        return Ok(assemble_report(inst, &step, outcome, seed));
    }
    Err(Error::Degenerate(format!(
        "step degenerate (C <= 0) after {DEGENERATE_RETRY_CAP} resamples"
    )))
}

fn assemble_report(
    inst: &Instance,
    step: &StepOutput,
    outcome: CombineOutcome,
    seed: u64,
) -> DualityReport {
    let rounded = round_randomized(&outcome.u, derive_seed(seed, 0x0f0f));
    let rounded_energy = inst.evaluate(&rounded).expect("rounded length matches");
    let (witness_index, witness_bound) = match &outcome.witness {
        Some(w) => (Some(w.coeff_index), Some(w.bound)),
        None => (None, None),
    };
    DualityReport {
        branch: outcome.branch,
        c: step.c,
        hz_w2: outcome.value_at_w2,
        hz_u: outcome.value,
        rounded_energy,
        rounded,
        s_size: step.s.iter().filter(|&&b| b).count(),
        improvement_ratio: outcome.value / inst.num_terms() as f64,
        seed,
        flipped: false,
        witness_index,
        witness_bound,
    }
}

/// Flip every spin; for odd k this negates the objective exactly.
pub fn sign_flip_odd_k(inst: &Instance, z: &Assignment) -> Result<Assignment> {
    if inst.k.is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "sign flip changes nothing for even k = {}",
            inst.k
        )));
    }
    Ok(z.flipped())
}

/// Five-number-ish summary of a sample.
#[derive(Debug, Clone, Serialize)]
pub struct DistSummary {
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl DistSummary {
    fn from_sorted(sorted: &[f64]) -> Self {
        let m = sorted.len();
        let q = |f: f64| sorted[((f * m as f64).ceil() as usize).clamp(1, m) - 1];
        DistSummary {
            mean: sorted.iter().sum::<f64>() / m as f64,
            min: sorted[0],
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            max: sorted[m - 1],
        }
    }
}

/// Result of an amplified run.
#[derive(Debug, Clone, Serialize)]
pub struct AmplifiedRun {
    /// All reports, one per repetition, in repetition order, each already
    /// sign-normalized for odd k.
    pub reports: Vec<DualityReport>,
    pub best_index: usize,
    pub c_summary: DistSummary,
    pub energy_summary: DistSummary,
    pub branch_a_count: usize,
    pub branch_b_count: usize,
}

impl AmplifiedRun {
    pub fn best(&self) -> &DualityReport {
        &self.reports[self.best_index]
    }
}

/// Run `config.repetitions` independent repetitions (seeds derived from
/// `config.seed`) and keep the report with the best rounded energy after
/// odd-k sign normalization. Repetitions execute in parallel; the outcome is
/// deterministic (ties resolve to the lowest repetition index).
pub fn run_amplified(inst: &Instance, config: &RunConfig) -> Result<AmplifiedRun> {
    config.validate()?;
    let odd_k = inst.k % 2 == 1;
    let mut reports: Vec<DualityReport> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut cfg = config.clone();
            cfg.seed = derive_seed(config.seed, rep as u64);
            run_once(inst, &cfg)
        })
        .collect::<Result<_>>()?;
    if odd_k {
        for r in &mut reports {
            if r.rounded_energy < 0 {
                r.rounded = r.rounded.flipped();
                r.rounded_energy = -r.rounded_energy;
                r.flipped = true;
            }
        }
    }
    let best_index = reports
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            (a.rounded_energy, std::cmp::Reverse(*ia))
                .cmp(&(b.rounded_energy, std::cmp::Reverse(*ib)))
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut cs: Vec<f64> = reports.iter().map(|r| r.c).collect();
    cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut es: Vec<f64> = reports.iter().map(|r| r.rounded_energy as f64).collect();
    es.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let branch_a_count = reports.iter().filter(|r| r.branch == Branch::A).count();
    Ok(AmplifiedRun {
        branch_a_count,
        branch_b_count: reports.len() - branch_a_count,
        best_index,
        c_summary: DistSummary::from_sorted(&cs),
        energy_summary: DistSummary::from_sorted(&es),
        reports,
    })
}
