//! MAX-K-LIN-2 instances and objective evaluation.
//!
//! An instance is a signed k-uniform hypergraph over n spins: the objective
//! `H(z) = sum_t sign_t * prod_{i in t} z_i` is maximized over z in {-1,+1}^n.
//! Evaluation comes in three flavors: exact integer evaluation on spin
//! assignments, the multilinear extension on fractional assignments, and the
//! fully symmetrized multi-vector form that is linear in each of its k
//! arguments.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, rng_from_seed};

/// One signed monomial: a strictly increasing tuple of `k` spin indices.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Term {
    pub idx: Vec<u32>,
    pub sign: i8,
}

/// A MAX-K-LIN-2 instance.
///
/// Immutable after construction; all evaluation methods take `&self` and are
/// safe to call from any number of threads.
#[derive(Debug, Clone)]
pub struct Instance {
    pub(crate) n: usize,
    pub(crate) k: usize,
    /// Degree bound: exact spin degree when `regular`, max degree otherwise.
    pub(crate) d: usize,
    pub(crate) regular: bool,
    pub(crate) terms: Vec<Term>,
    /// For each spin, indices into `terms` of the monomials containing it.
    adjacency: Vec<Vec<u32>>,
}

impl Instance {
    /// Build an instance from raw parts, validating every structural
    /// invariant (distinct sorted tuples, degree bookkeeping, term count).
    pub fn new(n: usize, k: usize, d: usize, regular: bool, terms: Vec<Term>) -> Result<Self> {
        let mut inst = Instance {
            n,
            k,
            d,
            regular,
            terms,
            adjacency: Vec::new(),
        };
        inst.rebuild_adjacency();
        inst.validate()?;
        Ok(inst)
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.n];
        for (t, term) in self.terms.iter().enumerate() {
            for &i in &term.idx {
                if (i as usize) < self.n {
                    adj[i as usize].push(t as u32);
                }
            }
        }
        self.adjacency = adj;
    }

    /// Check all invariants, reporting the first violation with the
    /// offending term index.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Input(format!("k must be >= 2, got {}", self.k)));
        }
        let mut seen = BTreeSet::new();
        for (t, term) in self.terms.iter().enumerate() {
            if term.sign != 1 && term.sign != -1 {
                return Err(Error::Input(format!(
                    "terms[{t}]: sign must be +1 or -1, got {}",
                    term.sign
                )));
            }
            if term.idx.len() != self.k {
                return Err(Error::Input(format!(
                    "terms[{t}]: expected {} indices, got {}",
                    self.k,
                    term.idx.len()
                )));
            }
            if !term.idx.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Input(format!(
                    "terms[{t}]: indices must be strictly increasing"
                )));
            }
            if let Some(&last) = term.idx.last() {
                if last as usize >= self.n {
                    return Err(Error::Input(format!(
                        "terms[{t}]: index {last} out of range for n = {}",
                        self.n
                    )));
                }
            }
            if !seen.insert(term.idx.clone()) {
                return Err(Error::Input(format!("terms[{t}]: duplicate monomial")));
            }
        }
        let degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        if self.regular {
            if let Some(i) = degrees.iter().position(|&deg| deg != self.d) {
                return Err(Error::Input(format!(
                    "regular instance but spin {i} has degree {} != d = {}",
                    degrees[i], self.d
                )));
            }
            if self.terms.len() * self.k != self.d * self.n {
                return Err(Error::Input(format!(
                    "regular instance must have d*n/k = {} terms, got {}",
                    self.d * self.n / self.k,
                    self.terms.len()
                )));
            }
        } else {
            let max_deg = degrees.iter().copied().max().unwrap_or(0);
            if self.d != max_deg {
                return Err(Error::Input(format!(
                    "non-regular instance must set d to the max degree {max_deg}, got {}",
                    self.d
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Term indices containing spin `i`.
    pub fn terms_of(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Exact integer objective on a spin assignment.
    pub fn evaluate(&self, z: &Assignment) -> Result<i64> {
        if z.spins.len() != self.n {
            return Err(Error::Input(format!(
                "assignment has {} spins, instance has {}",
                z.spins.len(),
                self.n
            )));
        }
        let mut total = 0i64;
        for term in &self.terms {
            let mut prod = term.sign as i64;
            for &i in &term.idx {
                prod *= z.spins[i as usize] as i64;
            }
            total += prod;
        }
        Ok(total)
    }

    /// Multilinear extension: the unique polynomial linear in each variable
    /// that agrees with `evaluate` on {-1,+1}^n. Equals the expected value of
    /// the objective under independent randomized rounding of `v`.
    pub fn evaluate_fractional(&self, v: &FractionalAssignment) -> Result<f64> {
        if v.values.len() != self.n {
            return Err(Error::Input(format!(
                "fractional assignment has {} entries, instance has {}",
                v.values.len(),
                self.n
            )));
        }
        if let Some(pos) = v.values.iter().position(|e| e.is_nan() || e.abs() > 1.0) {
            return Err(Error::Input(format!(
                "entry {pos} is {}, must lie in [-1, 1]",
                v.values[pos]
            )));
        }
        Ok(self.evaluate_values_unchecked(&v.values))
    }

    /// The same polynomial on a raw slice, without the cube check; line
    /// restrictions evaluate it outside [-1,1]^n on purpose.
    pub(crate) fn evaluate_values_unchecked(&self, values: &[f64]) -> f64 {
        let mut total = 0.0;
        for term in &self.terms {
            let mut prod = term.sign as f64;
            for &i in &term.idx {
                prod *= values[i as usize];
            }
            total += prod;
        }
        total
    }

    /// Symmetrized multi-vector form: linear in each of exactly `k` vector
    /// arguments, invariant under permuting them, and collapsing to
    /// `evaluate_fractional` when all arguments coincide.
    pub fn evaluate_multivector(&self, vs: &[&FractionalAssignment]) -> Result<f64> {
        if vs.len() != self.k {
            return Err(Error::Input(format!(
                "expected {} vectors, got {}",
                self.k,
                vs.len()
            )));
        }
        for v in vs {
            if v.values.len() != self.n {
                return Err(Error::Input(format!(
                    "vector has {} entries, instance has {}",
                    v.values.len(),
                    self.n
                )));
            }
        }
        // Group equal arguments so the permutation average becomes a
        // multinomial-weighted sum over slot assignments; every use in this
        // crate has at most three distinct vectors.
        let mut groups: Vec<(&FractionalAssignment, usize)> = Vec::new();
        for v in vs {
            match groups.iter_mut().find(|(g, _)| g.values == v.values) {
                Some((_, m)) => *m += 1,
                None => groups.push((v, 1)),
            }
        }
        let slots: Vec<(&[f64], usize)> = groups
            .iter()
            .map(|(g, m)| (g.values.as_slice(), *m))
            .collect();
        Ok(self.evaluate_grouped(&slots))
    }

    /// Multi-vector form over pre-grouped arguments `(vector, multiplicity)`.
    /// Multiplicities must sum to `k`.
    pub(crate) fn evaluate_grouped(&self, groups: &[(&[f64], usize)]) -> f64 {
        let mult_total: usize = groups.iter().map(|(_, m)| m).sum();
        debug_assert_eq!(mult_total, self.k);
        // multinomial weight k! / prod(m_g!)
        let fact = |m: usize| -> u128 { (2..=m as u128).product() };
        let multinomial =
            fact(self.k) as f64 / groups.iter().map(|(_, m)| fact(*m)).product::<u128>() as f64;

        let mut total = 0.0;
        let mut counts: Vec<usize> = groups.iter().map(|(_, m)| *m).collect();
        for term in &self.terms {
            let sum = assign_slots(&term.idx, 0, groups, &mut counts, 1.0);
            total += term.sign as f64 * sum / multinomial;
        }
        total
    }

    /// Force on spin `i` at fractional point `v`: the partial derivative of
    /// the multilinear extension with respect to `v_i`. For spin inputs,
    /// `z_i * force(z, i)` is the contribution of i's terms to the objective.
    pub fn force(&self, v: &FractionalAssignment, i: usize) -> Result<f64> {
        if i >= self.n {
            return Err(Error::Input(format!(
                "spin index {i} out of range for n = {}",
                self.n
            )));
        }
        if v.values.len() != self.n {
            return Err(Error::Input(format!(
                "fractional assignment has {} entries, instance has {}",
                v.values.len(),
                self.n
            )));
        }
        Ok(self.force_unchecked(&v.values, i))
    }

    pub(crate) fn force_unchecked(&self, values: &[f64], i: usize) -> f64 {
        let mut total = 0.0;
        for &t in &self.adjacency[i] {
            let term = &self.terms[t as usize];
            let mut prod = term.sign as f64;
            for &j in &term.idx {
                if j as usize != i {
                    prod *= values[j as usize];
                }
            }
            total += prod;
        }
        total
    }

    /// Integer force on a spin assignment.
    pub fn force_spin(&self, z: &Assignment, i: usize) -> Result<i64> {
        if i >= self.n || z.spins.len() != self.n {
            return Err(Error::Input("index or length mismatch".into()));
        }
        let mut total = 0i64;
        for &t in &self.adjacency[i] {
            let term = &self.terms[t as usize];
            let mut prod = term.sign as i64;
            for &j in &term.idx {
                if j as usize != i {
                    prod *= z.spins[j as usize] as i64;
                }
            }
            total += prod;
        }
        Ok(total)
    }

    // ------------------------------------------------------------------
    // Generators
    // ------------------------------------------------------------------

    /// The complete pair antiferromagnet: k = 2, every pair present with
    /// sign -1, degree n-1. The canonical even-k adversary: the best
    /// assignment reaches only n/2 while the worst reaches -n(n-1)/2.
    pub fn antiferromagnet(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Input(format!(
                "antiferromagnet requires even n >= 2, got {n}"
            )));
        }
        let mut terms = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                terms.push(Term {
                    idx: vec![i, j],
                    sign: -1,
                });
            }
        }
        Instance::new(n, 2, n - 1, true, terms)
    }

    /// Clustered generalization for k = 2m: split m*d spins into d clusters
    /// of size m and put -1 on the product of every cluster pair.
    pub fn cluster_antiferromagnet(m: usize, d: usize) -> Result<Self> {
        if m < 1 || d < 2 {
            return Err(Error::Input(format!(
                "cluster antiferromagnet requires m >= 1 and d >= 2, got m={m} d={d}"
            )));
        }
        let n = m * d;
        let k = 2 * m;
        let cluster = |c: usize| -> Vec<u32> { (c * m..(c + 1) * m).map(|x| x as u32).collect() };
        let mut terms = Vec::with_capacity(d * (d - 1) / 2);
        for a in 0..d {
            for b in (a + 1)..d {
                let mut idx = cluster(a);
                idx.extend(cluster(b));
                idx.sort_unstable();
                terms.push(Term { idx, sign: -1 });
            }
        }
        Instance::new(n, k, d - 1, true, terms)
    }

    /// Random k-uniform d-regular instance with i.i.d. uniform signs,
    /// deterministic in `seed`.
    ///
    /// Configuration model: d stub copies of each spin are shuffled and cut
    /// into k-sets. Sets with repeated spins or duplicate monomials are
    /// repaired by swapping stubs with later positions; attempts that cannot
    /// be repaired restart with fresh randomness, up to a fixed cap.
    pub fn random_regular(n: usize, k: usize, d: usize, seed: u64) -> Result<Self> {
        if k < 2 || d < 1 || n < k {
            return Err(Error::Input(format!(
                "infeasible parameters n={n} k={k} d={d}"
            )));
        }
        if !(d * n).is_multiple_of(k) {
            return Err(Error::Input(format!("k = {k} must divide d*n = {}", d * n)));
        }
        if d > binomial(n - 1, k - 1) {
            return Err(Error::Input(format!(
                "degree {d} exceeds the number of available monomials per spin"
            )));
        }
        let num_terms = d * n / k;
        let mut rng = rng_from_seed(seed);
        const MAX_ATTEMPTS: usize = 1000;
        'attempt: for _ in 0..MAX_ATTEMPTS {
            let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
            for i in 0..n as u32 {
                stubs.extend(std::iter::repeat_n(i, d));
            }
            // Fisher-Yates
            for i in (1..stubs.len()).rev() {
                let j = rng::uniform_index(&mut rng, i + 1);
                stubs.swap(i, j);
            }
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            let mut sets: Vec<Vec<u32>> = Vec::with_capacity(num_terms);
            for t in 0..num_terms {
                let base = t * k;
                // repair pass: make the k-set distinct and new by swapping in
                // stubs from positions after this set
                let mut tries = 0usize;
                loop {
                    let mut set: Vec<u32> = stubs[base..base + k].to_vec();
                    set.sort_unstable();
                    let distinct = set.windows(2).all(|w| w[0] < w[1]);
                    if distinct && !seen.contains(&set) {
                        seen.insert(set.clone());
                        sets.push(set);
                        break;
                    }
                    tries += 1;
                    if tries > 200 || base + k >= stubs.len() {
                        continue 'attempt;
                    }
                    // swap a random in-set position with a random later stub
                    let a = base + rng::uniform_index(&mut rng, k);
                    let b = base + k + rng::uniform_index(&mut rng, stubs.len() - base - k);
                    stubs.swap(a, b);
                }
            }
            let mut terms: Vec<Term> = sets
                .into_iter()
                .map(|idx| Term {
                    idx,
                    sign: rng::uniform_sign(&mut rng),
                })
                .collect();
            terms.sort_by(|a, b| a.idx.cmp(&b.idx));
            return Instance::new(n, k, d, true, terms);
        }
        Err(Error::Generation(format!(
            "no {k}-uniform {d}-regular instance on {n} spins found after {MAX_ATTEMPTS} attempts"
        )))
    }

    /// Resample every sign i.i.d. uniform, keeping the term structure.
    pub fn resample_signs(&self, seed: u64) -> Instance {
        let mut rng = rng_from_seed(seed);
        let mut inst = self.clone();
        for term in &mut inst.terms {
            term.sign = rng::uniform_sign(&mut rng);
        }
        inst
    }

    // ------------------------------------------------------------------
    // File format
    // ------------------------------------------------------------------

    /// Canonical JSON: terms sorted by index tuple, fixed key order,
    /// byte-stable across runs.
    pub fn to_canonical_json(&self) -> String {
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.idx.cmp(&b.idx));
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\"n\":{},\"k\":{},\"d\":{},\"regular\":{},\"terms\":[",
            self.n, self.k, self.d, self.regular
        );
        for (t, term) in sorted.iter().enumerate() {
            if t > 0 {
                out.push(',');
            }
            let _ = write!(out, "{{\"idx\":[");
            for (j, i) in term.idx.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{i}");
            }
            let _ = write!(out, "],\"sign\":{}}}", term.sign);
        }
        out.push_str("]}");
        out
    }

    /// Parse and fully validate an instance from JSON. Syntax errors carry
    /// the line and column from the parser; semantic errors name the term.
    pub fn from_json_str(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            k: usize,
            d: usize,
            regular: bool,
            terms: Vec<Term>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| {
            Error::Input(format!(
                "instance JSON parse error at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Instance::new(raw.n, raw.k, raw.d, raw.regular, raw.terms)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Instance::from_json_str(&s)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical_json())?;
        Ok(())
    }

    /// FNV-1a fingerprint of the canonical JSON; embedded in every output
    /// artifact so results can be traced back to the exact instance.
    pub fn content_hash(&self) -> String {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for b in self.to_canonical_json().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// Recursive slot assignment for the symmetrized multi-vector form: each of
/// the term's indices is assigned to one of the argument groups, respecting
/// remaining multiplicities; the products over all assignments are summed.
fn assign_slots(
    idx: &[u32],
    pos: usize,
    groups: &[(&[f64], usize)],
    remaining: &mut [usize],
    acc: f64,
) -> f64 {
    if pos == idx.len() {
        return acc;
    }
    if acc == 0.0 {
        // whole subtree contributes nothing; still must respect counts
        // (value is zero regardless of how the rest is assigned), so count
        // the number of completions times zero = zero.
        return 0.0;
    }
    let mut sum = 0.0;
    for (g, (vec, _)) in groups.iter().enumerate() {
        if remaining[g] == 0 {
            continue;
        }
        remaining[g] -= 1;
        sum += assign_slots(
            idx,
            pos + 1,
            groups,
            remaining,
            acc * vec[idx[pos] as usize],
        );
        remaining[g] += 1;
    }
    sum
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u128;
    let mut den = 1u128;
    for j in 0..k {
        num *= (n - j) as u128;
        den *= (j + 1) as u128;
    }
    (num / den).min(usize::MAX as u128) as usize
}

/// A spin assignment: entries exactly +/-1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub spins: Vec<i8>,
}

impl Assignment {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(pos) = spins.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::Input(format!(
                "spin {pos} is {}, must be +1 or -1",
                spins[pos]
            )));
        }
        Ok(Assignment { spins })
    }

    pub fn all_plus(n: usize) -> Self {
        Assignment { spins: vec![1; n] }
    }

    /// Decode from a basis-state index: bit b set means spin b is -1.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment {
            spins: (0..n)
                .map(|b| if bits >> b & 1 == 0 { 1 } else { -1 })
                .collect(),
        }
    }

    pub fn flipped(&self) -> Self {
        Assignment {
            spins: self.spins.iter().map(|&s| -s).collect(),
        }
    }

    pub fn to_fractional(&self) -> FractionalAssignment {
        FractionalAssignment {
            values: self.spins.iter().map(|&s| s as f64).collect(),
        }
    }

    /// Bitstring rendering, spin 0 first; '0' encodes +1.
    pub fn to_bitstring(&self) -> String {
        self.spins
            .iter()
            .map(|&s| if s == 1 { '0' } else { '1' })
            .collect()
    }
}

/// A fractional assignment: entries in [-1, +1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalAssignment {
    pub values: Vec<f64>,
}

impl FractionalAssignment {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| v.is_nan() || v.abs() > 1.0) {
            return Err(Error::Input(format!(
                "entry {pos} is {}, must lie in [-1, 1]",
                values[pos]
            )));
        }
        Ok(FractionalAssignment { values })
    }

    pub fn zeros(n: usize) -> Self {
        FractionalAssignment {
            values: vec![0.0; n],
        }
    }

    /// Unit indicator vector e_i.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut values = vec![0.0; n];
        values[i] = 1.0;
        FractionalAssignment { values }
    }
}

/// Independent randomized rounding: spin i becomes +1 with probability
/// (1 + v_i)/2, preserving the multilinear expectation. Deterministic in
/// `seed`.
pub fn round_randomized(v: &FractionalAssignment, seed: u64) -> Assignment {
    let mut rng = rng_from_seed(seed);
    let spins = v
        .values
        .iter()
        .map(|&vi| {
            if rng::uniform01(&mut rng) < (1.0 + vi) / 2.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Assignment { spins }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;

    fn ex2(n: usize) -> Instance {
        Instance::antiferromagnet(n).unwrap()
    }

    #[test]
    fn antiferromagnet_structure() {
        let inst = ex2(4);
        assert_eq!(inst.num_terms(), 6);
        assert_eq!(inst.d, 3);
        assert!(inst.terms.iter().all(|t| t.sign == -1));
        let single = ex2(2);
        assert_eq!(single.num_terms(), 1);
        assert!(Instance::antiferromagnet(3).is_err());
        assert!(Instance::antiferromagnet(0).is_err());
    }

    #[test]
    fn evaluate_balanced_and_aligned() {
        let inst = ex2(4);
        let balanced = Assignment::new(vec![1, 1, -1, -1]).unwrap();
        assert_eq!(inst.evaluate(&balanced).unwrap(), 2);
        let aligned = Assignment::all_plus(4);
        assert_eq!(inst.evaluate(&aligned).unwrap(), -6);
    }

    #[test]
    fn even_k_is_flip_invariant() {
        let inst = ex2(6);
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let z = Assignment::new((0..6).map(|_| rng::uniform_sign(&mut rng)).collect()).unwrap();
            assert_eq!(
                inst.evaluate(&z).unwrap(),
                inst.evaluate(&z.flipped()).unwrap()
            );
        }
    }

    #[test]
    fn fractional_agrees_and_extends() {
        let inst = ex2(4);
        assert_eq!(
            inst.evaluate_fractional(&FractionalAssignment::zeros(4))
                .unwrap(),
            0.0
        );
        let v = FractionalAssignment::new(vec![0.5; 4]).unwrap();
        assert!((inst.evaluate_fractional(&v).unwrap() - (-1.5)).abs() < 1e-12);
        let z = Assignment::new(vec![1, -1, 1, -1]).unwrap();
        assert_eq!(
            inst.evaluate_fractional(&z.to_fractional()).unwrap(),
            inst.evaluate(&z).unwrap() as f64
        );
    }

    #[test]
    fn fractional_rejects_out_of_range() {
        assert!(FractionalAssignment::new(vec![0.0, 1.2]).is_err());
        assert!(FractionalAssignment::new(vec![f64::NAN]).is_err());
        // the evaluator re-checks, so a hand-built value cannot sneak past
        let inst = Instance::antiferromagnet(2).unwrap();
        let bad = FractionalAssignment {
            values: vec![0.0, 1.5],
        };
        assert!(inst.evaluate_fractional(&bad).is_err());
    }

    #[test]
    fn multivector_single_term_example() {
        // single term -Z2Z3 on three spins (0-based indices 1, 2)
        let inst = Instance::new(
            3,
            2,
            1,
            false,
            vec![Term {
                idx: vec![1, 2],
                sign: -1,
            }],
        )
        .unwrap();
        let e1 = FractionalAssignment::unit(3, 1);
        let e2 = FractionalAssignment::unit(3, 2);
        let val = inst.evaluate_multivector(&[&e1, &e2]).unwrap();
        assert!((val - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn multivector_collapses_to_fractional() {
        let inst = Instance::random_regular(8, 3, 3, 11).unwrap();
        let mut rng = rng_from_seed(5);
        let v = FractionalAssignment::new(
            (0..8)
                .map(|_| rng::uniform01(&mut rng) * 2.0 - 1.0)
                .collect(),
        )
        .unwrap();
        let multi = inst.evaluate_multivector(&[&v, &v, &v]).unwrap();
        let frac = inst.evaluate_fractional(&v).unwrap();
        assert!((multi - frac).abs() < 1e-12);
        // order 1 in each slot: one zero argument kills everything
        let zero = FractionalAssignment::zeros(8);
        assert_eq!(inst.evaluate_multivector(&[&v, &zero, &v]).unwrap(), 0.0);
        assert!(inst.evaluate_multivector(&[&v, &v]).is_err());
    }

    #[test]
    fn multivector_argument_permutation_invariance() {
        let inst = Instance::random_regular(9, 3, 2, 2).unwrap();
        let mut rng = rng_from_seed(8);
        let mk = |rng: &mut crate::rng::Rng| {
            FractionalAssignment::new((0..9).map(|_| rng::uniform01(rng) * 2.0 - 1.0).collect())
                .unwrap()
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let c = mk(&mut rng);
        let v1 = inst.evaluate_multivector(&[&a, &b, &c]).unwrap();
        let v2 = inst.evaluate_multivector(&[&c, &a, &b]).unwrap();
        let v3 = inst.evaluate_multivector(&[&b, &c, &a]).unwrap();
        assert!((v1 - v2).abs() < 1e-12);
        assert!((v1 - v3).abs() < 1e-12);
    }

    #[test]
    fn force_two_term_example() {
        // Z1Z2Z3Z4 + Z1Z3Z4Z5 in 1-based labels
        let inst = Instance::new(
            5,
            4,
            2,
            false,
            vec![
                Term {
                    idx: vec![0, 1, 2, 3],
                    sign: 1,
                },
                Term {
                    idx: vec![0, 2, 3, 4],
                    sign: 1,
                },
            ],
        )
        .unwrap();
        let ones = Assignment::all_plus(5).to_fractional();
        assert_eq!(inst.force(&ones, 0).unwrap(), 2.0);
        assert_eq!(inst.force(&FractionalAssignment::zeros(5), 0).unwrap(), 0.0);
        assert!(inst.force(&ones, 7).is_err());
    }

    #[test]
    fn force_identity_sums_to_k_times_energy() {
        let inst = Instance::random_regular(10, 3, 3, 4).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..50 {
            let z =
                Assignment::new((0..10).map(|_| rng::uniform_sign(&mut rng)).collect()).unwrap();
            let lhs: i64 = (0..10)
                .map(|i| z.spins[i] as i64 * inst.force_spin(&z, i).unwrap())
                .sum();
            assert_eq!(lhs, 3 * inst.evaluate(&z).unwrap());
        }
    }

    #[test]
    fn cluster_reduces_to_plain_antiferromagnet() {
        let a = Instance::cluster_antiferromagnet(1, 4).unwrap();
        let b = Instance::antiferromagnet(4).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        let c = Instance::cluster_antiferromagnet(2, 3).unwrap();
        assert_eq!(c.n, 6);
        assert_eq!(c.k, 4);
        assert_eq!(c.num_terms(), 3);
        assert!(c.regular);
        assert!((0..6).all(|i| c.degree(i) == 2));
    }

    #[test]
    fn random_regular_is_deterministic_and_regular() {
        let a = Instance::random_regular(12, 3, 6, 42).unwrap();
        let b = Instance::random_regular(12, 3, 6, 42).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_eq!(a.num_terms(), 24);
        assert!((0..12).all(|i| a.degree(i) == 6));
        let c = Instance::random_regular(12, 3, 6, 43).unwrap();
        assert_ne!(a.to_canonical_json(), c.to_canonical_json());
    }

    #[test]
    fn random_regular_complete_graph() {
        // the unique 2-uniform 7-regular hypergraph on 8 vertices
        for seed in [0u64, 1, 2] {
            let inst = Instance::random_regular(8, 2, 7, seed).unwrap();
            assert_eq!(inst.num_terms(), 28);
            assert!((0..8).all(|i| inst.degree(i) == 7));
        }
    }

    #[test]
    fn random_regular_rejects_infeasible() {
        assert!(Instance::random_regular(10, 3, 4, 0).is_err()); // 40 % 3 != 0
        assert!(Instance::random_regular(4, 2, 5, 0).is_err()); // d > n-1
    }

    #[test]
    fn rounding_endpoints() {
        let n = 16;
        let ones = FractionalAssignment::new(vec![1.0; n]).unwrap();
        assert_eq!(round_randomized(&ones, 0).spins, vec![1i8; n]);
        let minus = FractionalAssignment::new(vec![-1.0; n]).unwrap();
        assert_eq!(round_randomized(&minus, 0).spins, vec![-1i8; n]);
    }

    #[test]
    fn rounding_preserves_expectation() {
        // Monte Carlo mean of the rounded energy tracks the multilinear value
        let inst = Instance::random_regular(10, 3, 3, 7).unwrap();
        let mut rng = rng_from_seed(13);
        let v = FractionalAssignment::new(
            (0..10)
                .map(|_| rng::uniform01(&mut rng) * 2.0 - 1.0)
                .collect(),
        )
        .unwrap();
        let target = inst.evaluate_fractional(&v).unwrap();
        let trials = 100_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for rep in 0..trials {
            let z = round_randomized(&v, derive_seed(99, rep));
            let e = inst.evaluate(&z).unwrap() as f64;
            sum += e;
            sum_sq += e * e;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (mean - target).abs() <= 3.0 * stderr + 1e-9,
            "mean {mean} vs target {target} (stderr {stderr})"
        );
    }

    #[test]
    fn canonical_json_roundtrip_and_validation() {
        let inst = Instance::random_regular(9, 3, 4, 5).unwrap();
        let json = inst.to_canonical_json();
        let back = Instance::from_json_str(&json).unwrap();
        assert_eq!(json, back.to_canonical_json());
        assert_eq!(inst.content_hash(), back.content_hash());

        // semantic failures name the term
        let bad = r#"{"n":4,"k":2,"d":1,"regular":false,"terms":[{"idx":[1,1],"sign":1}]}"#;
        let err = Instance::from_json_str(bad).unwrap_err().to_string();
        assert!(err.contains("terms[0]"), "{err}");
        // syntax failures carry line/column
        let err = Instance::from_json_str("{\n  \"n\": oops")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Feasible (n, k, d) triples: n a multiple of k keeps k | d*n.
        fn params() -> impl Strategy<Value = (usize, usize, usize, u64)> {
            (2usize..=4, 2usize..=4, 1usize..=4, any::<u64>())
                .prop_map(|(k, m, d, seed)| (k * m, k, d, seed))
                .prop_filter("degree fits", |&(n, _, d, _)| d <= (n - 1).min(8))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn force_identity_holds_everywhere((n, k, d, seed) in params(), zbits: u64) {
                let inst = Instance::random_regular(n, k, d, seed).unwrap();
                let z = Assignment::from_bits(zbits, n);
                let energy = inst.evaluate(&z).unwrap();
                let force_sum: i64 = (0..n)
                    .map(|i| z.spins[i] as i64 * inst.force_spin(&z, i).unwrap())
                    .sum();
                prop_assert_eq!(force_sum, k as i64 * energy);
            }

            #[test]
            fn extension_agrees_on_corners((n, k, d, seed) in params(), zbits: u64) {
                let inst = Instance::random_regular(n, k, d, seed).unwrap();
                let z = Assignment::from_bits(zbits, n);
                let frac = inst.evaluate_fractional(&z.to_fractional()).unwrap();
                prop_assert_eq!(frac, inst.evaluate(&z).unwrap() as f64);
            }

            #[test]
            fn canonical_json_round_trips((n, k, d, seed) in params()) {
                let inst = Instance::random_regular(n, k, d, seed).unwrap();
                let json = inst.to_canonical_json();
                let back = Instance::from_json_str(&json).unwrap();
                prop_assert_eq!(json, back.to_canonical_json());
            }
        }
    }

    #[test]
    fn degree_bookkeeping_enforced() {
        // regular flag with wrong d must be rejected
        let terms = vec![Term {
            idx: vec![0, 1],
            sign: 1,
        }];
        assert!(Instance::new(3, 2, 2, true, terms.clone()).is_err());
        // non-regular: d must equal max degree
        assert!(Instance::new(3, 2, 2, false, terms.clone()).is_err());
        assert!(Instance::new(3, 2, 1, false, terms).is_ok());
    }
}
