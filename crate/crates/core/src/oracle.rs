//! Brute-force ground truth and empirical probability checks.
//!
//! Exhaustive optima over 2^n assignments (Gray-code incremental updates, so
//! each step touches only the d terms of the flipped spin), exact and sampled
//! force moments under the solver's sampling distribution, and extreme-value
//! statistics over random-sign instances.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::rng::{self, derive_seed, rng_from_seed};

/// Default cap on exhaustive enumeration (2^24 states).
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 24;

/// Exact spectrum of an instance over all assignments.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub max_energy: i64,
    pub argmax: Assignment,
    pub min_energy: i64,
    pub argmin: Assignment,
    /// energy -> number of assignments attaining it; counts sum to 2^n.
    pub histogram: BTreeMap<i64, u64>,
}

/// Walk all 2^m Gray codes over the low `m` spins starting from `base_bits`,
/// folding (energy, index) pairs into the accumulator.
struct GrayScan<'a> {
    inst: &'a Instance,
    term_vals: Vec<i8>,
}

impl<'a> GrayScan<'a> {
    fn new(inst: &'a Instance, bits: u64) -> Self {
        let term_vals = inst
            .terms
            .iter()
            .map(|t| {
                let mut v = t.sign;
                for &i in &t.idx {
                    if bits >> i & 1 == 1 {
                        v = -v;
                    }
                }
                v
            })
            .collect();
        GrayScan { inst, term_vals }
    }

    fn energy(&self) -> i64 {
        self.term_vals.iter().map(|&v| v as i64).sum()
    }

    /// Flip one spin, updating only its terms; returns the new energy delta.
    fn flip(&mut self, spin: usize, energy: &mut i64) {
        for &t in self.inst.terms_of(spin) {
            let v = &mut self.term_vals[t as usize];
            *energy -= 2 * *v as i64;
            *v = -*v;
        }
    }
}

struct BlockResult {
    max_energy: i64,
    max_index: u64,
    min_energy: i64,
    min_index: u64,
    histogram: BTreeMap<i64, u64>,
}

fn scan_block(inst: &Instance, high_bits: u64, low_n: usize) -> BlockResult {
    let mut scan = GrayScan::new(inst, high_bits << low_n);
    let mut energy = scan.energy();
    // current basis index; the Gray walk keeps it in sync with the flips
    let mut index = high_bits << low_n;
    let mut res = BlockResult {
        max_energy: energy,
        max_index: index,
        min_energy: energy,
        min_index: index,
        histogram: BTreeMap::new(),
    };
    *res.histogram.entry(energy).or_insert(0) += 1;
    for step in 1u64..(1u64 << low_n) {
        let spin = step.trailing_zeros() as usize;
        scan.flip(spin, &mut energy);
        index ^= 1 << spin;
        *res.histogram.entry(energy).or_insert(0) += 1;
        if energy > res.max_energy || (energy == res.max_energy && index < res.max_index) {
            res.max_energy = energy;
            res.max_index = index;
        }
        if energy < res.min_energy || (energy == res.min_energy && index < res.min_index) {
            res.min_energy = energy;
            res.min_index = index;
        }
    }
    res
}

/// Exhaustive optimum by Gray-code enumeration. Ties resolve to the lowest
/// basis index, so the result is deterministic including under the parallel
/// block split used for larger n.
pub fn brute_force_optimum(inst: &Instance, limit: usize) -> Result<SpectrumSummary> {
    if inst.n > limit {
        return Err(Error::Limit(format!(
            "exhaustive enumeration needs n <= {limit}, instance has n = {}",
            inst.n
        )));
    }
    let blocks: Vec<BlockResult> = if inst.n >= 18 {
        let high = 4usize;
        let low_n = inst.n - high;
        (0u64..(1 << high))
            .into_par_iter()
            .map(|hb| scan_block(inst, hb, low_n))
            .collect()
    } else {
        vec![scan_block(inst, 0, inst.n)]
    };

    let mut it = blocks.into_iter();
    let mut acc = it.next().expect("at least one block");
    for b in it {
        if b.max_energy > acc.max_energy
            || (b.max_energy == acc.max_energy && b.max_index < acc.max_index)
        {
            acc.max_energy = b.max_energy;
            acc.max_index = b.max_index;
        }
        if b.min_energy < acc.min_energy
            || (b.min_energy == acc.min_energy && b.min_index < acc.min_index)
        {
            acc.min_energy = b.min_energy;
            acc.min_index = b.min_index;
        }
        for (e, c) in b.histogram {
            *acc.histogram.entry(e).or_insert(0) += c;
        }
    }
    Ok(SpectrumSummary {
        max_energy: acc.max_energy,
        argmax: Assignment::from_bits(acc.max_index, inst.n),
        min_energy: acc.min_energy,
        argmin: Assignment::from_bits(acc.min_index, inst.n),
        histogram: acc.histogram,
    })
}

/// How force moments are estimated.
#[derive(Debug, Clone, Copy)]
pub enum ForceMode {
    /// Exact expectation over the sampling distribution, enumerating only
    /// the spins that appear in the target spin's terms.
    Exact,
    /// Monte Carlo with the given trial count and seed.
    Sampled { trials: u64, seed: u64 },
}

/// The distribution of the surrounding spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceDistribution {
    /// The solver's step distribution: each spin lands in S with
    /// probability 1/2 (entry 0), otherwise uniform +/-1.
    HalfMasked,
    /// Plain uniform +/-1 on every spin (no masking).
    Uniform,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForceMoments {
    pub spin: usize,
    pub mean_sq: f64,
    pub mean_abs: f64,
    /// Rows (t, empirical Pr[|F| >= t*sqrt(d)]), nonincreasing in t.
    pub tail_table: Vec<(f64, f64)>,
}

/// Moments and tail frequencies of the force on one spin.
///
/// In exact mode the expectation enumerates the value distribution of every
/// relevant neighbor spin (3 states under [`ForceDistribution::HalfMasked`],
/// 2 under [`ForceDistribution::Uniform`]), so it is exact to roundoff.
pub fn force_moment_stats(
    inst: &Instance,
    spin: usize,
    mode: ForceMode,
    dist: ForceDistribution,
    thresholds: &[f64],
) -> Result<ForceMoments> {
    if spin >= inst.n {
        return Err(Error::Input(format!(
            "spin index {spin} out of range for n = {}",
            inst.n
        )));
    }
    // spins feeding F_spin
    let mut relevant: Vec<usize> = Vec::new();
    for &t in inst.terms_of(spin) {
        for &j in &inst.terms[t as usize].idx {
            if j as usize != spin && !relevant.contains(&(j as usize)) {
                relevant.push(j as usize);
            }
        }
    }
    relevant.sort_unstable();
    let sqrt_d = (inst.d as f64).sqrt();

    match mode {
        ForceMode::Exact => {
            let states: &[(f64, f64)] = match dist {
                ForceDistribution::HalfMasked => &[(0.0, 0.5), (1.0, 0.25), (-1.0, 0.25)],
                ForceDistribution::Uniform => &[(1.0, 0.5), (-1.0, 0.5)],
            };
            let max_relevant = 16;
            let state_count = (states.len() as f64).powi(relevant.len() as i32);
            if relevant.len() > max_relevant || state_count > 5e8 {
                return Err(Error::Limit(format!(
                    "exact force moments infeasible: {} relevant spins, {} states",
                    relevant.len(),
                    state_count
                )));
            }
            let mut mean_sq = 0.0;
            let mut mean_abs = 0.0;
            let mut tail = vec![0.0; thresholds.len()];
            let mut values = vec![0.0f64; inst.n];
            enumerate_states(
                inst,
                spin,
                &relevant,
                0,
                1.0,
                states,
                &mut values,
                &mut |f, w| {
                    mean_sq += w * f * f;
                    mean_abs += w * f.abs();
                    for (row, &t) in tail.iter_mut().zip(thresholds) {
                        if f.abs() >= t * sqrt_d {
                            *row += w;
                        }
                    }
                },
            );
            Ok(ForceMoments {
                spin,
                mean_sq,
                mean_abs,
                tail_table: thresholds.iter().copied().zip(tail).collect(),
            })
        }
        ForceMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::Input("sampled mode needs trials >= 1".into()));
            }
            let mut rng = rng_from_seed(seed);
            let mut mean_sq = 0.0;
            let mut mean_abs = 0.0;
            let mut tail = vec![0u64; thresholds.len()];
            let mut values = vec![0.0f64; inst.n];
            for _ in 0..trials {
                for &j in &relevant {
                    values[j] = match dist {
                        ForceDistribution::HalfMasked => {
                            if rng::bernoulli(&mut rng, 0.5) {
                                0.0
                            } else {
                                rng::uniform_sign(&mut rng) as f64
                            }
                        }
                        ForceDistribution::Uniform => rng::uniform_sign(&mut rng) as f64,
                    };
                }
                let f = inst.force_unchecked(&values, spin);
                mean_sq += f * f;
                mean_abs += f.abs();
                for (row, &t) in tail.iter_mut().zip(thresholds) {
                    if f.abs() >= t * sqrt_d {
                        *row += 1;
                    }
                }
            }
            let trials_f = trials as f64;
            Ok(ForceMoments {
                spin,
                mean_sq: mean_sq / trials_f,
                mean_abs: mean_abs / trials_f,
                tail_table: thresholds
                    .iter()
                    .copied()
                    .zip(tail.into_iter().map(|c| c as f64 / trials_f))
                    .collect(),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_states(
    inst: &Instance,
    spin: usize,
    relevant: &[usize],
    pos: usize,
    weight: f64,
    states: &[(f64, f64)],
    values: &mut [f64],
    visit: &mut impl FnMut(f64, f64),
) {
    if pos == relevant.len() {
        let f = inst.force_unchecked(values, spin);
        visit(f, weight);
        return;
    }
    for &(v, p) in states {
        values[relevant[pos]] = v;
        enumerate_states(
            inst,
            spin,
            relevant,
            pos + 1,
            weight * p,
            states,
            values,
            visit,
        );
    }
}

/// Hypercontractive tail bound exp(-(k/2e) t^(2/k)), valid for order-k
/// polynomials of uniform signs at t >= (2e)^(k/2).
pub fn tail_bound(k: usize, t: f64) -> f64 {
    (-(k as f64) / (2.0 * std::f64::consts::E) * t.powf(2.0 / k as f64)).exp()
}

/// Anti-concentration floor: an order-k polynomial of uniform signs
/// exceeds its root-mean-square with probability at least exp(-4k)/4.
pub fn anti_concentration_floor(k: usize) -> f64 {
    0.25 * (-4.0 * k as f64).exp()
}

/// Threshold (2e)^(k/2) where the bound becomes applicable.
pub fn tail_threshold(k: usize) -> f64 {
    (2.0 * std::f64::consts::E).powf(k as f64 / 2.0)
}

/// Extreme-value scan over instances with fixed term structure and
/// freshly random signs.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremesReport {
    pub trials: u64,
    /// max |H| per trial, sorted ascending.
    pub max_abs: Vec<i64>,
    /// The same values normalized by n*sqrt(d), sorted ascending.
    pub normalized: Vec<f64>,
}

impl ExtremesReport {
    /// Quantile by nearest-rank on the sorted normalized values.
    pub fn quantile(&self, q: f64) -> f64 {
        let m = self.normalized.len();
        let rank = ((q * m as f64).ceil() as usize).clamp(1, m);
        self.normalized[rank - 1]
    }
}

/// Distribution of max |H| over random-sign instances sharing the term
/// structure of `base`. Deterministic in `seed`.
pub fn random_model_extremes(
    base: &Instance,
    trials: u64,
    seed: u64,
    limit: usize,
) -> Result<ExtremesReport> {
    if base.n > limit {
        return Err(Error::Limit(format!(
            "extremes scan needs n <= {limit}, instance has n = {}",
            base.n
        )));
    }
    let results: Result<Vec<i64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let inst = base.resample_signs(derive_seed(seed, trial));
            let s = brute_force_optimum(&inst, limit)?;
            Ok(s.max_energy.abs().max(s.min_energy.abs()))
        })
        .collect();
    let mut max_abs = results?;
    max_abs.sort_unstable();
    let norm = base.n as f64 * (base.d as f64).sqrt();
    let normalized = max_abs.iter().map(|&m| m as f64 / norm).collect();
    Ok(ExtremesReport {
        trials,
        max_abs,
        normalized,
    })
}
