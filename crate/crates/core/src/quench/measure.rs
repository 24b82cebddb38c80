//! Projective measurement and the measurement-combining identity.
//!
//! Y-basis measurements are done by rotating the qubit so its Y eigenbasis
//! lands on the computational basis, sampling a Z outcome, and rotating
//! back; the collapsed state is then a genuine Y eigenstate in the original
//! representation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{FractionalAssignment, Instance};
use crate::rng::{self, rng_from_seed, Rng};

use super::{pauli, StateVector};

/// In-place single-qubit gate on qubit q given its 2x2 matrix rows.
fn apply_single_qubit(state: &mut StateVector, q: usize, m: [[Complex64; 2]; 2]) {
    let bit = 1usize << q;
    for idx in 0..state.amps.len() {
        if idx & bit != 0 {
            continue;
        }
        let a0 = state.amps[idx];
        let a1 = state.amps[idx | bit];
        state.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
        state.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
}

/// Rotation taking the Y eigenbasis to the computational basis.
fn y_to_z() -> [[Complex64; 2]; 2] {
    let s = 1.0 / 2f64.sqrt();
    [
        [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
    ]
}

fn z_to_y() -> [[Complex64; 2]; 2] {
    let s = 1.0 / 2f64.sqrt();
    [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(0.0, s), Complex64::new(0.0, -s)],
    ]
}

/// Projective Z measurement of qubit q; collapses and renormalizes the
/// state, returning the eigenvalue (+1 for bit 0).
pub fn measure_qubit_z(state: &mut StateVector, q: usize, rng: &mut Rng) -> i8 {
    let bit = 1usize << q;
    let p0: f64 = state
        .amps
        .iter()
        .enumerate()
        .filter(|(idx, _)| idx & bit == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total = state.norm_sq();
    let outcome_plus = rng::uniform01(rng) * total < p0;
    let keep_bit = if outcome_plus { 0 } else { bit };
    let kept = if outcome_plus { p0 } else { total - p0 };
    let scale = 1.0 / kept.sqrt();
    for idx in 0..state.amps.len() {
        if idx & bit == keep_bit {
            state.amps[idx] *= scale;
        } else {
            state.amps[idx] = Complex64::new(0.0, 0.0);
        }
    }
    if outcome_plus {
        1
    } else {
        -1
    }
}

/// Projective Y measurement of qubit q via basis rotation.
pub fn measure_qubit_y(state: &mut StateVector, q: usize, rng: &mut Rng) -> i8 {
    apply_single_qubit(state, q, y_to_z());
    let outcome = measure_qubit_z(state, q, rng);
    apply_single_qubit(state, q, z_to_y());
    outcome
}

/// Outcome of one measurement-combining round.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumCombineOutcome {
    /// Qubits measured in the Y basis.
    pub s1: Vec<usize>,
    /// Y eigenvalues on s1, zero elsewhere.
    pub v1: FractionalAssignment,
    /// Z eigenvalues off s1, zero elsewhere.
    pub v2: FractionalAssignment,
    /// Multi-vector objective at (v1, v1, v2, ..., v2).
    pub lhs: f64,
    /// The same value recovered from the post-measurement state through the
    /// force-derivative operator.
    pub rhs: f64,
}

/// Sample the subset S1 (each qubit with probability 1/k), measure S1 in Y
/// and the rest in Z, and return both sides of the combining identity
///
///   H(v1, v1, v2, ..., v2) = <chi| sum_i Y_i dF_i/dt |chi> / (2 k (k-1)),
///
/// which holds exactly for the post-measurement product state chi. Each
/// unordered pair of Y positions in a monomial arises twice in the operator
/// sum and each string carries a factor 2, fixing the normalization.
pub fn quantum_combine(
    inst: &Instance,
    state: &StateVector,
    seed: u64,
) -> Result<QuantumCombineOutcome> {
    let k = inst.k;
    if k < 2 {
        return Err(Error::Contract(format!(
            "measurement combining needs k >= 2, got {k}"
        )));
    }
    if state.amps.len() != 1usize << inst.n {
        return Err(Error::Input("state dimension mismatch".into()));
    }
    let mut rng = rng_from_seed(seed);
    let s1_mask: Vec<bool> = (0..inst.n)
        .map(|_| rng::bernoulli(&mut rng, 1.0 / k as f64))
        .collect();
    let mut chi = state.clone();
    let mut v1 = vec![0.0f64; inst.n];
    let mut v2 = vec![0.0f64; inst.n];
    for q in 0..inst.n {
        if s1_mask[q] {
            v1[q] = measure_qubit_y(&mut chi, q, &mut rng) as f64;
        } else {
            v2[q] = measure_qubit_z(&mut chi, q, &mut rng) as f64;
        }
    }
    let groups: Vec<(&[f64], usize)> = [(v1.as_slice(), 2usize), (v2.as_slice(), k - 2)]
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .collect();
    let lhs = inst.evaluate_grouped(&groups);
    let yf: f64 = (0..inst.n)
        .map(|i| pauli::y_force_derivative_expectation(inst, i, &chi))
        .sum();
    let rhs = yf / (2.0 * k as f64 * (k as f64 - 1.0));
    Ok(QuantumCombineOutcome {
        s1: (0..inst.n).filter(|&q| s1_mask[q]).collect(),
        v1: FractionalAssignment { values: v1 },
        v2: FractionalAssignment { values: v2 },
        lhs,
        rhs,
    })
}
