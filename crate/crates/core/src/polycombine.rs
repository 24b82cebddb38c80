//! Solution combining on line restrictions.
//!
//! Restricting the multilinear objective to a line x*w1 + w2 gives a
//! univariate polynomial Q of degree at most k whose coefficients are
//! binomial-weighted multi-vector values. Three combining routines turn
//! multi-vector values into single-vector solutions with explicit
//! guarantees:
//!
//! * [`combine_sign_patterns`]: from k vectors with multi-vector value c,
//!   a 2^k sign enumeration produces u with |H(u)| >= (k!/k^k)|c|.
//! * [`combine_line_max`]: from (w1, w2), the max of |Q| on [-1,1] produces
//!   u = x*w1 + w2 with |H(u)| >= |a1|/k minus the grid tolerance.
//! * [`combine_dichotomy`]: the improve-or-witness split. Either the signed
//!   max of Q beats Q(0) + eps*C/6 (branch A), or some coefficient
//!   |a_i| >= C/(6 eps) is witnessed and the sign enumeration yields
//!   branch B with |H(u)| >= (k!/k^k)/binom(k,i) * |a_i|.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{FractionalAssignment, Instance};

/// Univariate polynomial a_0 + a_1 x + ... + a_k x^k.
#[derive(Debug, Clone, Serialize)]
pub struct UniPoly {
    pub coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn eval(&self, x: f64) -> f64 {
        // Horner
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// Derivative magnitude bound on [-1,1]: sum_i i*|a_i|.
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| i as f64 * a.abs())
            .sum()
    }
}

/// Grid-search objective: plain value or absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxMode {
    Signed,
    Absolute,
}

/// Which side of the dichotomy a combine produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    A,
    B,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::A => write!(f, "A"),
            Branch::B => write!(f, "B"),
        }
    }
}

/// Witness for branch B: the certified coefficient and the sign pattern that
/// achieved the combined value.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Coefficient index i >= 1 with |a_i| >= C/(6 eps).
    pub coeff_index: usize,
    pub coeff_value: f64,
    /// Chosen pattern over the expanded k slots (+1/-1 per slot).
    pub pattern: Vec<i8>,
    /// Certified lower bound (k!/k^k)/binom(k,i) * |a_i| on |H(u)|.
    pub bound: f64,
}

/// Outcome of a combining run.
#[derive(Debug, Clone, Serialize)]
pub struct CombineOutcome {
    pub branch: Branch,
    pub u: FractionalAssignment,
    /// Multilinear objective value at u.
    pub value: f64,
    /// Objective value at w2 alone (the branch-A baseline Q(0)).
    pub value_at_w2: f64,
    /// Linear coefficient of the restricted polynomial (the constant C).
    pub a1: f64,
    /// Restricted polynomial coefficients.
    pub q: UniPoly,
    /// Grid argmax for branch A (u = x*·w1 + w2).
    pub x_star: Option<f64>,
    pub witness: Option<Witness>,
    /// Grid tolerance L * 2/grid_points at the resolution used.
    pub grid_tolerance: f64,
}

/// Exact coefficients of x -> H(x*w1 + w2), a polynomial of degree <= k.
///
/// Evaluates at k+1 Chebyshev nodes and solves the small interpolation
/// system; the result is exact up to roundoff because the restriction really
/// is a degree-k polynomial.
pub fn restrict_to_line(
    inst: &Instance,
    w1: &FractionalAssignment,
    w2: &FractionalAssignment,
) -> Result<UniPoly> {
    if w1.values.len() != inst.n || w2.values.len() != inst.n {
        return Err(Error::Input(format!(
            "line vectors must have length {}",
            inst.n
        )));
    }
    let k = inst.k;
    let nodes: Vec<f64> = (0..=k)
        .map(|j| (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * (k + 1)) as f64).cos())
        .collect();
    let mut rhs = Vec::with_capacity(k + 1);
    let mut point = vec![0.0; inst.n];
    for &x in &nodes {
        for (p, (a, b)) in point.iter_mut().zip(w1.values.iter().zip(&w2.values)) {
            *p = x * a + b;
        }
        // entries may exceed 1 in magnitude here, which is fine for
        // interpolation purposes
        rhs.push(inst.evaluate_values_unchecked(&point));
    }
    // Vandermonde solve, (k+1) x (k+1)
    let m = k + 1;
    let mut a = vec![0.0f64; m * m];
    for (r, &x) in nodes.iter().enumerate() {
        let mut p = 1.0;
        for c in 0..m {
            a[r * m + c] = p;
            p *= x;
        }
    }
    let coeffs = solve_dense(&mut a, &mut rhs, m)?;
    Ok(UniPoly { coeffs })
}

/// Gaussian elimination with partial pivoting on a row-major m x m system.
fn solve_dense(a: &mut [f64], b: &mut [f64], m: usize) -> Result<Vec<f64>> {
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&r1, &r2| {
                a[r1 * m + col]
                    .abs()
                    .partial_cmp(&a[r2 * m + col].abs())
                    .unwrap()
            })
            .unwrap();
        if a[pivot * m + col].abs() < 1e-300 {
            return Err(Error::Input("singular interpolation system".into()));
        }
        if pivot != col {
            for c in 0..m {
                a.swap(col * m + c, pivot * m + c);
            }
            b.swap(col, pivot);
        }
        for row in (col + 1)..m {
            let f = a[row * m + col] / a[col * m + col];
            if f == 0.0 {
                continue;
            }
            for c in col..m {
                a[row * m + c] -= f * a[col * m + c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for c in (row + 1)..m {
            acc -= a[row * m + c] * x[c];
        }
        x[row] = acc / a[row * m + row];
    }
    Ok(x)
}

/// Coefficient of the full product x_1*...*x_k in a black-box polynomial of
/// order <= k on k variables, via the signed average over {-1,+1}^k. Also
/// returns the pattern maximizing |p| and that maximum, certifying
/// max |p| >= |coefficient|.
pub fn coefficient_by_sign_average<F: Fn(&[f64]) -> f64>(p: F, k: usize) -> (f64, Vec<i8>, f64) {
    let mut coeff = 0.0;
    let mut best_abs = f64::NEG_INFINITY;
    let mut best_pattern = vec![1i8; k];
    let mut x = vec![0.0f64; k];
    for bits in 0u64..(1 << k) {
        let mut parity = 1.0;
        for (a, xa) in x.iter_mut().enumerate() {
            *xa = if bits >> a & 1 == 0 { 1.0 } else { -1.0 };
            parity *= *xa;
        }
        let val = p(&x);
        coeff += parity * val;
        if val.abs() > best_abs {
            best_abs = val.abs();
            best_pattern = x.iter().map(|&v| v as i8).collect();
        }
    }
    coeff /= (1u64 << k) as f64;
    (coeff, best_pattern, best_abs)
}

/// Best point of a polynomial on [-1,1] over a uniform grid.
///
/// The returned value is within L * (2/grid_points) of the true optimum,
/// where L is the derivative bound of `q`.
pub fn maximize_on_interval(q: &UniPoly, mode: MaxMode, grid_points: usize) -> (f64, f64) {
    let grid_points = grid_points.max(2);
    let mut best_x = -1.0;
    let mut best = f64::NEG_INFINITY;
    for j in 0..grid_points {
        let x = -1.0 + 2.0 * j as f64 / (grid_points - 1) as f64;
        let v = q.eval(x);
        let score = match mode {
            MaxMode::Signed => v,
            MaxMode::Absolute => v.abs(),
        };
        if score > best {
            best = score;
            best_x = x;
        }
    }
    (best_x, best)
}

/// Outcome of the 2^k sign-pattern combine.
#[derive(Debug, Clone, Serialize)]
pub struct SignPatternOutcome {
    pub u: FractionalAssignment,
    /// Multilinear objective at u.
    pub value: f64,
    /// Multi-vector value of the basis (the constant c in the guarantee).
    pub c: f64,
    /// Certified lower bound (k!/k^k)|c| on |value|.
    pub bound: f64,
    pub pattern: Vec<i8>,
}

/// Combine k vectors (given as groups with multiplicities summing to k) into
/// a single u = (1/k) sum_a x_a w_a over all 2^k sign patterns, keeping the
/// pattern maximizing |H(u)|. Ties keep the earliest pattern in enumeration
/// order (all-plus first, slot 0 is the fastest bit), so the result is
/// deterministic.
///
/// `c_target` optionally overrides the basis value used for the reported
/// bound; by default it is computed from the basis via the multi-vector form.
pub fn combine_sign_patterns(
    inst: &Instance,
    basis: &[(FractionalAssignment, usize)],
    c_target: Option<f64>,
) -> Result<SignPatternOutcome> {
    let k = inst.k;
    let mult_sum: usize = basis.iter().map(|(_, m)| m).sum();
    if mult_sum != k {
        return Err(Error::Input(format!(
            "basis multiplicities sum to {mult_sum}, expected k = {k}"
        )));
    }
    for (w, _) in basis {
        if w.values.len() != inst.n {
            return Err(Error::Input(format!(
                "basis vector must have length {}",
                inst.n
            )));
        }
        if let Some(pos) = w.values.iter().position(|v| v.is_nan() || v.abs() > 1.0) {
            return Err(Error::Input(format!(
                "basis vector entry {pos} outside [-1, 1]"
            )));
        }
    }
    let groups: Vec<(&[f64], usize)> = basis
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(w, m)| (w.values.as_slice(), *m))
        .collect();
    let c = match c_target {
        Some(c) => c,
        None => inst.evaluate_grouped(&groups),
    };

    // expand groups into k slots
    let mut slot_vec: Vec<&[f64]> = Vec::with_capacity(k);
    for (w, m) in &groups {
        for _ in 0..*m {
            slot_vec.push(w);
        }
    }

    let mut best_abs = f64::NEG_INFINITY;
    let mut best_pattern = vec![1i8; k];
    let mut best_u = vec![0.0; inst.n];
    let mut u = vec![0.0f64; inst.n];
    for bits in 0u64..(1 << k) {
        u.iter_mut().for_each(|e| *e = 0.0);
        for (a, w) in slot_vec.iter().enumerate() {
            let xa = if bits >> a & 1 == 0 { 1.0 } else { -1.0 };
            for (e, &wv) in u.iter_mut().zip(w.iter()) {
                *e += xa * wv;
            }
        }
        u.iter_mut().for_each(|e| *e /= k as f64);
        let total = inst.evaluate_values_unchecked(&u);
        if total.abs() > best_abs {
            best_abs = total.abs();
            best_pattern = (0..k)
                .map(|a| if bits >> a & 1 == 0 { 1i8 } else { -1 })
                .collect();
            best_u.copy_from_slice(&u);
        }
    }
    let value = inst.evaluate_values_unchecked(&best_u);
    let u = FractionalAssignment { values: best_u };
    Ok(SignPatternOutcome {
        u,
        value,
        c,
        bound: factorial_over_power(k) * c.abs(),
        pattern: best_pattern,
    })
}

/// k!/k^k.
pub fn factorial_over_power(k: usize) -> f64 {
    (1..=k).map(|j| j as f64 / k as f64).product()
}

pub fn binomial_f(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    let mut v = 1.0;
    for j in 0..r {
        v *= (n - j) as f64 / (j + 1) as f64;
    }
    v
}

/// Maximize |H| along the line: u = x*·w1 + w2 at the grid argmax of |Q|.
/// Guarantee: |H(u)| >= |a1|/k - grid tolerance.
pub fn combine_line_max(
    inst: &Instance,
    w1: &FractionalAssignment,
    w2: &FractionalAssignment,
    grid_points: usize,
) -> Result<CombineOutcome> {
    let q = restrict_to_line(inst, w1, w2)?;
    let (x_star, _) = maximize_on_interval(&q, MaxMode::Absolute, grid_points);
    let u = line_point(w1, w2, x_star);
    let value = inst.evaluate_values_unchecked(&u.values);
    Ok(CombineOutcome {
        branch: Branch::A,
        value_at_w2: q.eval(0.0),
        a1: q.coeffs[1],
        grid_tolerance: q.derivative_bound() * 2.0 / grid_points as f64,
        q,
        x_star: Some(x_star),
        witness: None,
        u,
        value,
    })
}

/// The improve-or-witness dichotomy.
///
/// Computes Q on the line, sets C = a1 (requires C > 0; degenerate inputs
/// are signalled so the caller can resample). If the signed grid max beats
/// Q(0) + eps*C/6, branch A returns u on the line. Otherwise a coefficient
/// with |a_i| >= C/(6 eps) exists and is fed to the sign-pattern combine;
/// among all certified i, the one maximizing the final guarantee
/// (k!/k^k)/binom(k,i)*|a_i| is witnessed.
pub fn combine_dichotomy(
    inst: &Instance,
    w1: &FractionalAssignment,
    w2: &FractionalAssignment,
    epsilon: f64,
    grid_points: usize,
) -> Result<CombineOutcome> {
    if epsilon <= 0.0 {
        return Err(Error::Input(format!("epsilon must be > 0, got {epsilon}")));
    }
    let k = inst.k;
    let q = restrict_to_line(inst, w1, w2)?;
    let c = q.coeffs[1];
    if c <= 0.0 {
        return Err(Error::Degenerate(format!(
            "linear coefficient C = {c} is not positive"
        )));
    }
    let baseline = q.eval(0.0);
    let (x_star, best_signed) = maximize_on_interval(&q, MaxMode::Signed, grid_points);
    let grid_tolerance = q.derivative_bound() * 2.0 / grid_points as f64;
    if best_signed >= baseline + epsilon * c / 6.0 {
        let u = line_point(w1, w2, x_star);
        let value = inst.evaluate_values_unchecked(&u.values);
        return Ok(CombineOutcome {
            branch: Branch::A,
            u,
            value,
            value_at_w2: baseline,
            a1: c,
            q,
            x_star: Some(x_star),
            witness: None,
            grid_tolerance,
        });
    }

    // Branch B: a large coefficient must exist. Pick the one with the best
    // certified guarantee; fall back to the largest coefficient if roundoff
    // pushed everything just below the threshold.
    let threshold = c / (6.0 * epsilon);
    let mut best_i = 0usize;
    let mut best_guarantee = f64::NEG_INFINITY;
    for i in 1..=k {
        let ai = q.coeffs[i].abs();
        if ai < threshold {
            continue;
        }
        let g = factorial_over_power(k) / binomial_f(k, i) * ai;
        if g > best_guarantee {
            best_guarantee = g;
            best_i = i;
        }
    }
    if best_i == 0 {
        best_i = (1..=k)
            .max_by(|&a, &b| q.coeffs[a].abs().partial_cmp(&q.coeffs[b].abs()).unwrap())
            .unwrap();
    }
    let i = best_i;
    let basis = vec![(w1.clone(), i), (w2.clone(), k - i)];
    // the bound certifies the actual coefficient:
    // |a_i| = binom(k,i) |P(w1 x i, w2 x (k-i))|
    let p_value = q.coeffs[i] / binomial_f(k, i);
    let combined = combine_sign_patterns(inst, &basis, Some(p_value))?;
    Ok(CombineOutcome {
        branch: Branch::B,
        u: combined.u,
        value: combined.value,
        value_at_w2: baseline,
        a1: c,
        witness: Some(Witness {
            coeff_index: i,
            coeff_value: q.coeffs[i],
            pattern: combined.pattern,
            bound: combined.bound,
        }),
        q,
        x_star: None,
        grid_tolerance,
    })
}

/// x*w1 + w2; entries are bounded by |w1_i| + |w2_i|, which stays within
/// [-1, 1] for the disjoint-support pairs the solver produces.
fn line_point(
    w1: &FractionalAssignment,
    w2: &FractionalAssignment,
    x: f64,
) -> FractionalAssignment {
    FractionalAssignment {
        values: w1
            .values
            .iter()
            .zip(&w2.values)
            .map(|(&a, &b)| x * a + b)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Term;
    use crate::rng::{self, rng_from_seed};

    fn single_pair_instance() -> Instance {
        // -Z1Z2 on two spins
        Instance::new(
            2,
            2,
            1,
            true,
            vec![Term {
                idx: vec![0, 1],
                sign: -1,
            }],
        )
        .unwrap()
    }

    fn random_fractional(n: usize, rng: &mut rng::Rng) -> FractionalAssignment {
        FractionalAssignment::new((0..n).map(|_| rng::uniform01(rng) * 2.0 - 1.0).collect())
            .unwrap()
    }

    #[test]
    fn restrict_single_term_is_minus_x() {
        let inst = single_pair_instance();
        let w1 = FractionalAssignment::new(vec![1.0, 0.0]).unwrap();
        let w2 = FractionalAssignment::new(vec![0.0, 1.0]).unwrap();
        let q = restrict_to_line(&inst, &w1, &w2).unwrap();
        assert!((q.coeffs[0]).abs() < 1e-12);
        assert!((q.coeffs[1] + 1.0).abs() < 1e-12);
        assert!((q.coeffs[2]).abs() < 1e-12);
    }

    #[test]
    fn restrict_zero_direction_is_constant() {
        let inst = Instance::random_regular(8, 3, 3, 1).unwrap();
        let mut rng = rng_from_seed(2);
        let w2 = random_fractional(8, &mut rng);
        let q = restrict_to_line(&inst, &FractionalAssignment::zeros(8), &w2).unwrap();
        let expect = inst.evaluate_fractional(&w2).unwrap();
        assert!((q.eval(0.7) - expect).abs() < 1e-10);
        assert!(q.coeffs[1..].iter().all(|a| a.abs() < 1e-10));
    }

    #[test]
    fn restrict_matches_direct_evaluation() {
        let inst = Instance::random_regular(10, 4, 2, 3).unwrap();
        let mut rng = rng_from_seed(4);
        // keep |x*w1 + w2| <= 1 by halving both vectors
        let halve = |mut v: FractionalAssignment| {
            v.values.iter_mut().for_each(|e| *e *= 0.5);
            v
        };
        let w1 = halve(random_fractional(10, &mut rng));
        let w2 = halve(random_fractional(10, &mut rng));
        let q = restrict_to_line(&inst, &w1, &w2).unwrap();
        for _ in 0..50 {
            let x = rng::uniform01(&mut rng) * 2.0 - 1.0;
            let pt = FractionalAssignment::new(
                w1.values
                    .iter()
                    .zip(&w2.values)
                    .map(|(&a, &b)| x * a + b)
                    .collect(),
            )
            .unwrap();
            let direct = inst.evaluate_fractional(&pt).unwrap();
            let scale = direct.abs().max(1.0);
            assert!(
                (q.eval(x) - direct).abs() / scale < 1e-10,
                "x={x} q={} direct={direct}",
                q.eval(x)
            );
        }
        // endpoint consistency
        let at_one = inst
            .evaluate_fractional(&FractionalAssignment {
                values: w1
                    .values
                    .iter()
                    .zip(&w2.values)
                    .map(|(&a, &b)| a + b)
                    .collect(),
            })
            .unwrap();
        assert!((q.eval(1.0) - at_one).abs() < 1e-10);
        assert!((q.eval(0.0) - inst.evaluate_fractional(&w2).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn coefficients_match_multivector_path() {
        let inst = Instance::random_regular(9, 3, 4, 6).unwrap();
        let mut rng = rng_from_seed(7);
        let w1 = random_fractional(9, &mut rng);
        let w2 = random_fractional(9, &mut rng);
        let q = restrict_to_line(&inst, &w1, &w2).unwrap();
        for i in 0..=3 {
            let groups: Vec<(&[f64], usize)> =
                [(w1.values.as_slice(), i), (w2.values.as_slice(), 3 - i)]
                    .into_iter()
                    .filter(|(_, m)| *m > 0)
                    .collect();
            let expect = binomial_f(3, i) * inst.evaluate_grouped(&groups);
            assert!(
                (q.coeffs[i] - expect).abs() < 1e-9,
                "a_{i}: {} vs {expect}",
                q.coeffs[i]
            );
        }
    }

    #[test]
    fn sign_average_examples() {
        let (c, _, _) = coefficient_by_sign_average(|x| x[0] * x[1], 2);
        assert!((c - 1.0).abs() < 1e-14);
        let (c, _, _) = coefficient_by_sign_average(|x| x[0] + 5.0, 2);
        assert!(c.abs() < 1e-14);
        let (c, _, max_abs) =
            coefficient_by_sign_average(|x| 2.0 * x[0] * x[1] * x[2] + x[0] * x[0], 3);
        assert!((c - 2.0).abs() < 1e-14);
        assert!((max_abs - 3.0).abs() < 1e-14);
        assert!(max_abs >= c.abs());
    }

    #[test]
    fn grid_max_chebyshev_equioscillation() {
        // T3/3 has |max| = 1/3 on [-1,1]
        let q = UniPoly {
            coeffs: vec![0.0, -1.0, 0.0, 4.0 / 3.0],
        };
        let (_, v) = maximize_on_interval(&q, MaxMode::Absolute, 10_000);
        let tol = q.derivative_bound() * 2.0 / 10_000.0;
        assert!((v - 1.0 / 3.0).abs() <= tol);
    }

    #[test]
    fn grid_max_linear_and_constant() {
        let q = UniPoly {
            coeffs: vec![0.0, -1.0],
        };
        let (x, v) = maximize_on_interval(&q, MaxMode::Signed, 101);
        assert_eq!(x, -1.0);
        assert_eq!(v, 1.0);
        let c = UniPoly { coeffs: vec![3.5] };
        let (_, v) = maximize_on_interval(&c, MaxMode::Absolute, 2);
        assert_eq!(v, 3.5);
    }

    #[test]
    fn sign_patterns_tight_pair_case() {
        let inst = single_pair_instance();
        let basis = vec![
            (FractionalAssignment::unit(2, 0), 1),
            (FractionalAssignment::unit(2, 1), 1),
        ];
        let out = combine_sign_patterns(&inst, &basis, None).unwrap();
        // P(e0, e1) = -1/2; bound (2!/2^2)*1/2 = 1/4, met with equality
        assert!((out.c - (-0.5)).abs() < 1e-14);
        assert!((out.bound - 0.25).abs() < 1e-14);
        assert!((out.value.abs() - 0.25).abs() < 1e-14);
        assert!(out.u.values.iter().all(|v| v.abs() == 0.5));
    }

    #[test]
    fn sign_patterns_zero_basis() {
        let inst = single_pair_instance();
        let basis = vec![(FractionalAssignment::zeros(2), 2)];
        let out = combine_sign_patterns(&inst, &basis, None).unwrap();
        assert_eq!(out.value, 0.0);
        assert_eq!(out.c, 0.0);
        assert_eq!(out.bound, 0.0);
    }

    #[test]
    fn sign_patterns_guarantee_on_random_instances() {
        let cases = [(10usize, 2usize, 3usize), (12, 3, 4), (12, 4, 3)];
        for (trial, &(n, k, d)) in cases.iter().enumerate() {
            let inst = Instance::random_regular(n, k, d, 100 + trial as u64).unwrap();
            let mut rng = rng_from_seed(200 + trial as u64);
            for rep in 0..40 {
                let basis: Vec<(FractionalAssignment, usize)> = (0..k)
                    .map(|_| (random_fractional(n, &mut rng), 1))
                    .collect();
                let out = combine_sign_patterns(&inst, &basis, None).unwrap();
                assert!(
                    out.value.abs() >= out.bound - 1e-9,
                    "n={n} k={k} rep={rep}: |{}| < bound {}",
                    out.value,
                    out.bound
                );
            }
        }
    }

    #[test]
    fn sign_patterns_rejects_bad_multiplicities() {
        let inst = single_pair_instance();
        let basis = vec![(FractionalAssignment::zeros(2), 1)];
        assert!(combine_sign_patterns(&inst, &basis, None).is_err());
    }

    #[test]
    fn line_max_linear_case() {
        let inst = single_pair_instance();
        let w1 = FractionalAssignment::new(vec![1.0, 0.0]).unwrap();
        let w2 = FractionalAssignment::new(vec![0.0, 1.0]).unwrap();
        let out = combine_line_max(&inst, &w1, &w2, 10_000).unwrap();
        // Q = -x: |H(u)| = 1 >= |a1|/k = 1/2
        assert!((out.value.abs() - 1.0).abs() < 1e-12);
        assert!(out.value.abs() >= out.a1.abs() / 2.0 - out.grid_tolerance);
    }

    #[test]
    fn line_max_guarantee_on_random_trials() {
        let inst = Instance::random_regular(12, 3, 4, 17).unwrap();
        let mut rng = rng_from_seed(18);
        for _ in 0..60 {
            // disjoint supports keep |x*w1 + w2| <= 1
            let mask: Vec<bool> = (0..12).map(|_| rng::bernoulli(&mut rng, 0.5)).collect();
            let mut w1 = vec![0.0; 12];
            let mut w2 = vec![0.0; 12];
            for i in 0..12 {
                if mask[i] {
                    w1[i] = rng::uniform01(&mut rng) * 2.0 - 1.0;
                } else {
                    w2[i] = rng::uniform01(&mut rng) * 2.0 - 1.0;
                }
            }
            let w1 = FractionalAssignment::new(w1).unwrap();
            let w2 = FractionalAssignment::new(w2).unwrap();
            let out = combine_line_max(&inst, &w1, &w2, 4000).unwrap();
            assert!(
                out.value.abs() >= out.a1.abs() / 3.0 - out.grid_tolerance - 1e-12,
                "|{}| < |a1|/k = {}",
                out.value,
                out.a1.abs() / 3.0
            );
        }
    }

    #[test]
    fn dichotomy_linear_case_takes_branch_a() {
        let inst = single_pair_instance();
        // orient so C = a1 > 0: w1 = -e0 makes Q(x) = +x
        let w1 = FractionalAssignment::new(vec![-1.0, 0.0]).unwrap();
        let w2 = FractionalAssignment::new(vec![0.0, 1.0]).unwrap();
        let out = combine_dichotomy(&inst, &w1, &w2, 1.0, 10_000).unwrap();
        assert_eq!(out.branch, Branch::A);
        assert!((out.value - 1.0).abs() < 1e-12);
        assert!(out.value >= out.value_at_w2 + out.a1 / 6.0 - out.grid_tolerance);
    }

    #[test]
    fn dichotomy_rejects_degenerate_and_bad_epsilon() {
        let inst = single_pair_instance();
        let w1 = FractionalAssignment::new(vec![1.0, 0.0]).unwrap();
        let w2 = FractionalAssignment::new(vec![0.0, 1.0]).unwrap();
        // C = -1 < 0 is degenerate
        assert!(matches!(
            combine_dichotomy(&inst, &w1, &w2, 1.0, 100),
            Err(Error::Degenerate(_))
        ));
        assert!(combine_dichotomy(&inst, &w1, &w2, 0.0, 100).is_err());
    }

    #[test]
    fn dichotomy_huge_epsilon_forces_branch_b() {
        // with eps enormous, branch A's threshold is unreachable whenever the
        // polynomial has bounded gain, so the witness branch must fire
        let inst = Instance::antiferromagnet(8).unwrap();
        let mut rng = rng_from_seed(33);
        let mut fired = 0;
        for _ in 0..20 {
            let mask: Vec<bool> = (0..8).map(|_| rng::bernoulli(&mut rng, 0.5)).collect();
            let mut w1v = vec![0.0; 8];
            let mut w2v = vec![0.0; 8];
            for i in 0..8 {
                if mask[i] {
                    w1v[i] = if rng::bernoulli(&mut rng, 0.5) {
                        1.0
                    } else {
                        -1.0
                    };
                } else {
                    w2v[i] = if rng::bernoulli(&mut rng, 0.5) {
                        1.0
                    } else {
                        -1.0
                    };
                }
            }
            let w1 = FractionalAssignment::new(w1v).unwrap();
            let w2 = FractionalAssignment::new(w2v).unwrap();
            let q = restrict_to_line(&inst, &w1, &w2).unwrap();
            // C near zero makes the branch-A threshold vacuous; skip those
            if q.coeffs[1] <= 1e-3 {
                continue;
            }
            let out = combine_dichotomy(&inst, &w1, &w2, 1e6, 2000).unwrap();
            assert_eq!(out.branch, Branch::B);
            let w = out.witness.as_ref().unwrap();
            assert!(out.value.abs() >= w.bound - 1e-9);
            fired += 1;
        }
        assert!(fired > 0);
    }

    #[test]
    fn dichotomy_exactly_one_branch_and_inequality_holds() {
        let inst = Instance::random_regular(12, 4, 3, 55).unwrap();
        let mut rng = rng_from_seed(56);
        let mut seen_a = 0;
        let mut seen_b = 0;
        for rep in 0..200 {
            let mask: Vec<bool> = (0..12).map(|_| rng::bernoulli(&mut rng, 0.5)).collect();
            let mut w1v = vec![0.0; 12];
            let mut w2v = vec![0.0; 12];
            for i in 0..12 {
                if mask[i] {
                    w1v[i] = rng::uniform01(&mut rng) * 2.0 - 1.0;
                } else {
                    w2v[i] = rng::uniform01(&mut rng) * 2.0 - 1.0;
                }
            }
            let mut w1 = FractionalAssignment::new(w1v).unwrap();
            let w2 = FractionalAssignment::new(w2v).unwrap();
            let q = restrict_to_line(&inst, &w1, &w2).unwrap();
            if q.coeffs[1].abs() < 1e-9 {
                continue;
            }
            if q.coeffs[1] < 0.0 {
                w1.values.iter_mut().for_each(|v| *v = -*v);
            }
            let eps = 10f64.powf(rng::uniform01(&mut rng) * 3.0 - 1.5);
            let out = combine_dichotomy(&inst, &w1, &w2, eps, 4000).unwrap();
            match out.branch {
                Branch::A => {
                    seen_a += 1;
                    assert!(out.witness.is_none());
                    assert!(
                        out.value
                            >= out.value_at_w2 + eps * out.a1 / 6.0 - out.grid_tolerance - 1e-9,
                        "rep {rep}"
                    );
                }
                Branch::B => {
                    seen_b += 1;
                    let w = out.witness.as_ref().unwrap();
                    assert!(
                        out.value.abs() >= w.bound - 1e-9,
                        "rep {rep}: |{}| < {}",
                        out.value,
                        w.bound
                    );
                }
            }
        }
        assert!(seen_a > 0 && seen_b > 0, "A={seen_a} B={seen_b}");
    }

    #[test]
    fn solve_dense_small_system() {
        // 2x + y = 5, x - y = 1
        let mut a = vec![2.0, 1.0, 1.0, -1.0];
        let mut b = vec![5.0, 1.0];
        let x = solve_dense(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
    }
}
