//! Exact statevector simulation of the transverse-field quench.
//!
//! The system starts in the +X product state and evolves under
//! H = X + (alpha/d) H_Z. Basis convention: bit b of a basis index encodes
//! the Z eigenvalue of spin b, with bit 0 meaning +1. Everything here is
//! exact up to the propagator tolerance; no Trotterization.

mod krylov3;
mod meanfield;
mod measure;
mod pauli;
mod propagate;
mod spectral;
mod witness;

pub use krylov3::{krylov3, AlphaMode, Krylov3Report};
pub use meanfield::{mean_field_scan, MeanFieldPoint};
pub use measure::{quantum_combine, QuantumCombineOutcome};
pub use pauli::{force_derivative_strings, PauliString};
pub use spectral::{toy_frequency, FrequencyEstimate};
pub use witness::{witness_diagnostics, witness_state, WitnessInitial, WitnessReport};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};
use crate::rng::{self, rng_from_seed};

/// Default cap on qubit count (2^20 amplitudes).
pub const DEFAULT_QUBIT_LIMIT: usize = 20;

/// Normalized complex amplitude vector over 2^n basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Tensor product of per-qubit spinors (qubit 0 is the lowest bit).
    pub fn product(spinors: &[[Complex64; 2]]) -> StateVector {
        let n = spinors.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let mut v = Complex64::new(1.0, 0.0);
            for (b, sp) in spinors.iter().enumerate() {
                v *= sp[idx >> b & 1];
            }
            *amp = v;
        }
        StateVector { n, amps }
    }

    /// Inner product <self|other>.
    pub fn dot(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Born-rule samples of computational-basis assignments, deterministic
    /// in `seed`.
    pub fn sample_assignments(&self, count: usize, seed: u64) -> Vec<Assignment> {
        let mut rng = rng_from_seed(seed);
        // cumulative distribution, then binary search per draw
        let mut cum = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cum.push(acc);
        }
        let total = acc;
        (0..count)
            .map(|_| {
                let u = rng::uniform01(&mut rng) * total;
                let idx = cum.partition_point(|&c| c < u).min(self.amps.len() - 1);
                Assignment::from_bits(idx as u64, self.n)
            })
            .collect()
    }
}

/// The uniform superposition: every X_i has expectation +1.
pub fn plus_state(n: usize, limit: usize) -> Result<StateVector> {
    if n > limit {
        return Err(Error::Limit(format!(
            "statevector needs n <= {limit}, requested n = {n}"
        )));
    }
    let dim = 1usize << n;
    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![amp; dim],
    })
}

/// Observables exposed by [`QuenchSim::expectation`].
#[derive(Debug, Clone, Copy)]
pub enum Observable {
    /// Total transverse polarization sum_i X_i.
    X,
    /// Single-site X_i.
    Xi(usize),
    /// The diagonal objective H_Z.
    Hz,
    /// The full Hamiltonian X + (alpha/d) H_Z.
    H,
    /// Squared deviation (X - n)^2.
    XMinusNSq,
}

/// Simulator bound to one instance and one alpha: holds the diagonal
/// objective table and applies H without ever materializing a matrix.
pub struct QuenchSim<'a> {
    pub inst: &'a Instance,
    pub alpha: f64,
    /// Objective value of every basis state.
    diag: Vec<i32>,
}

impl<'a> QuenchSim<'a> {
    pub fn new(inst: &'a Instance, alpha: f64, limit: usize) -> Result<Self> {
        if inst.n > limit {
            return Err(Error::Limit(format!(
                "statevector needs n <= {limit}, instance has n = {}",
                inst.n
            )));
        }
        // alpha = 0 leaves a bare transverse field, still a valid simulator
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::Input(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(QuenchSim {
            inst,
            alpha,
            diag: energy_table(inst),
        })
    }

    pub fn coupling(&self) -> f64 {
        self.alpha / self.inst.d as f64
    }

    pub fn diag(&self) -> &[i32] {
        &self.diag
    }

    pub fn plus_state(&self) -> StateVector {
        let dim = 1usize << self.inst.n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector {
            n: self.inst.n,
            amps: vec![amp; dim],
        }
    }

    /// Unnormalized image H * psi.
    pub fn apply_h(&self, state: &StateVector) -> StateVector {
        StateVector {
            n: state.n,
            amps: self.apply_h_amps(&state.amps),
        }
    }

    /// H applied to a raw amplitude slice; the propagator calls this on its
    /// basis vectors without wrapping them.
    pub(crate) fn apply_h_amps(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for b in 0..self.inst.n {
            let bit = 1usize << b;
            for (idx, o) in out.iter_mut().enumerate() {
                *o += amps[idx ^ bit];
            }
        }
        let g = self.coupling();
        for (o, (a, &e)) in out.iter_mut().zip(amps.iter().zip(&self.diag)) {
            *o += a * g * e as f64;
        }
        out
    }

    /// X * psi (sum of single-bit flips).
    pub fn apply_x(&self, state: &StateVector) -> StateVector {
        let dim = state.amps.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for b in 0..self.inst.n {
            let bit = 1usize << b;
            for (idx, o) in out.iter_mut().enumerate() {
                *o += state.amps[idx ^ bit];
            }
        }
        StateVector {
            n: state.n,
            amps: out,
        }
    }

    /// H_Z * psi (diagonal multiply).
    pub fn apply_hz(&self, state: &StateVector) -> StateVector {
        StateVector {
            n: state.n,
            amps: state
                .amps
                .iter()
                .zip(&self.diag)
                .map(|(a, &e)| a * e as f64)
                .collect(),
        }
    }

    pub fn expectation(&self, state: &StateVector, obs: Observable) -> f64 {
        match obs {
            Observable::X => {
                let mut total = 0.0;
                for b in 0..self.inst.n {
                    let bit = 1usize << b;
                    total += state
                        .amps
                        .iter()
                        .enumerate()
                        .map(|(idx, a)| (a.conj() * state.amps[idx ^ bit]).re)
                        .sum::<f64>();
                }
                total
            }
            Observable::Xi(i) => {
                let bit = 1usize << i;
                state
                    .amps
                    .iter()
                    .enumerate()
                    .map(|(idx, a)| (a.conj() * state.amps[idx ^ bit]).re)
                    .sum()
            }
            Observable::Hz => state
                .amps
                .iter()
                .zip(&self.diag)
                .map(|(a, &e)| a.norm_sqr() * e as f64)
                .sum(),
            Observable::H => {
                self.expectation(state, Observable::X)
                    + self.coupling() * self.expectation(state, Observable::Hz)
            }
            Observable::XMinusNSq => {
                let x_psi = self.apply_x(state);
                let n = self.inst.n as f64;
                x_psi
                    .amps
                    .iter()
                    .zip(&state.amps)
                    .map(|(xa, a)| (xa - a * n).norm_sqr())
                    .sum()
            }
        }
    }

    /// Second moment of the diagonal objective.
    pub fn expectation_hz_sq(&self, state: &StateVector) -> f64 {
        state
            .amps
            .iter()
            .zip(&self.diag)
            .map(|(a, &e)| a.norm_sqr() * (e as f64) * (e as f64))
            .sum()
    }

    /// Evolve by exp(-iHt) within `tolerance` in vector norm.
    pub fn evolve(&self, state: &StateVector, t: f64, tolerance: f64) -> Result<StateVector> {
        propagate::evolve(self, state, t, tolerance)
    }

    /// The duality observable sum_i (2 Z_i F_i - Y_i dF_i/dt). The ZF part
    /// is evaluated term-by-term from characters; `2k<H_Z>` from the
    /// diagonal table provides an independent cross-check path.
    pub fn duality_observable(&self, state: &StateVector) -> f64 {
        let zf = self.zf_expectation(state);
        let yf: f64 = (0..self.inst.n)
            .map(|i| pauli::y_force_derivative_expectation(self.inst, i, state))
            .sum();
        zf - yf
    }

    /// sum_i <2 Z_i F_i> from per-term characters (no diagonal table).
    pub fn zf_expectation(&self, state: &StateVector) -> f64 {
        let mut per_term = vec![0.0f64; self.inst.num_terms()];
        for (t, term) in self.inst.terms.iter().enumerate() {
            let mask: u64 = term.idx.iter().fold(0u64, |m, &i| m | 1 << i);
            let mut e = 0.0;
            for (idx, a) in state.amps.iter().enumerate() {
                let parity = (idx as u64 & mask).count_ones() & 1;
                let chi = if parity == 0 { 1.0 } else { -1.0 };
                e += a.norm_sqr() * chi;
            }
            per_term[t] = term.sign as f64 * e;
        }
        let mut total = 0.0;
        for i in 0..self.inst.n {
            for &t in self.inst.terms_of(i) {
                total += 2.0 * per_term[t as usize];
            }
        }
        total
    }

    /// ||dF_i/dt * psi||^2, the squared norm behind the force-velocity
    /// diagnostic.
    pub fn force_derivative_norm_sq(&self, i: usize, state: &StateVector) -> f64 {
        let strings = pauli::force_derivative_strings(self.inst, i);
        let image = pauli::apply_strings(&strings, state);
        image.norm_sq()
    }

    /// Velocity diagnostic: || dF_i/dt exp(-iHv) psi_+ ||^2 at each time in
    /// `times`.
    pub fn velocity_diagnostic(
        &self,
        i: usize,
        times: &[f64],
        tolerance: f64,
    ) -> Result<Vec<(f64, f64)>> {
        if i >= self.inst.n {
            return Err(Error::Input(format!(
                "spin index {i} out of range for n = {}",
                self.inst.n
            )));
        }
        let mut out = Vec::with_capacity(times.len());
        let mut sorted: Vec<f64> = times.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut state = self.plus_state();
        let mut now = 0.0;
        for &v in &sorted {
            if v < now {
                return Err(Error::Input("times must be nonnegative".into()));
            }
            if v > now {
                state = self.evolve(&state, v - now, tolerance)?;
                now = v;
            }
            out.push((v, self.force_derivative_norm_sq(i, &state)));
        }
        Ok(out)
    }
}

/// Objective value of every basis state, filled by a Gray-code walk so each
/// step touches only the flipped spin's terms.
pub fn energy_table(inst: &Instance) -> Vec<i32> {
    let dim = 1usize << inst.n;
    let mut table = vec![0i32; dim];
    let mut term_vals: Vec<i8> = inst.terms.iter().map(|t| t.sign).collect();
    let mut energy: i64 = term_vals.iter().map(|&v| v as i64).sum();
    let mut index = 0u64;
    table[0] = energy as i32;
    for step in 1u64..dim as u64 {
        let spin = step.trailing_zeros() as usize;
        for &t in inst.terms_of(spin) {
            let v = &mut term_vals[t as usize];
            energy -= 2 * *v as i64;
            *v = -*v;
        }
        index ^= 1 << spin;
        table[index as usize] = energy as i32;
    }
    table
}

/// Configuration of a quench run.
#[derive(Debug, Clone, Serialize)]
pub struct QuenchConfig {
    pub alpha: f64,
    pub t_final: f64,
    /// Sorted sample times within [0, t_final].
    pub sample_times: Vec<f64>,
    /// Propagator error budget over the whole evolution.
    pub tolerance: f64,
    /// Number of computational-basis samples drawn at t_final.
    pub n_samples: usize,
    pub seed: u64,
}

impl QuenchConfig {
    /// Defaults: 32 uniform sample times, 1e-10 tolerance, 32 samples.
    pub fn new(alpha: f64, t_final: f64, seed: u64) -> Self {
        let samples = 32usize;
        QuenchConfig {
            alpha,
            t_final,
            sample_times: (1..=samples)
                .map(|j| t_final * j as f64 / samples as f64)
                .collect(),
            tolerance: 1e-10,
            n_samples: 32,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::Input(format!(
                "quench alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if self.t_final < 0.0 {
            return Err(Error::Input("t_final must be >= 0".into()));
        }
        let mut prev = 0.0;
        for &t in &self.sample_times {
            if t < prev || t > self.t_final + 1e-12 {
                return Err(Error::Input(
                    "sample times must be sorted within [0, t_final]".into(),
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

/// One row of a quench trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub hz: f64,
    pub h: f64,
    pub xvar: f64,
    pub duality_obs: f64,
    pub hz_sq: f64,
    /// sqrt(<(X-n)^2>), the left side of the moment inequality.
    pub hvar_lhs: f64,
    /// (alpha/d)(sqrt(N_T) + sqrt(<H_Z^2>)), the right side.
    pub hvar_rhs: f64,
}

/// Full record of a quench run.
#[derive(Debug, Clone, Serialize)]
pub struct QuenchTrace {
    pub alpha: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    /// Basis-state samples at t_final as bitstrings (spin 0 first).
    pub samples: Vec<String>,
    pub sample_energies: Vec<i64>,
}

/// Evolve through the configured sample times, recording all observables,
/// and sample assignments from the final state.
pub fn run_quench(inst: &Instance, config: &QuenchConfig, limit: usize) -> Result<QuenchTrace> {
    config.validate()?;
    let sim = QuenchSim::new(inst, config.alpha, limit)?;
    let n_t = inst.num_terms() as f64;
    let g = sim.coupling();
    let mut state = sim.plus_state();
    let mut now = 0.0;
    let mut rows = Vec::with_capacity(config.sample_times.len());
    let total_t = config.t_final.max(f64::MIN_POSITIVE);
    for &t in &config.sample_times {
        if t > now {
            let seg_tol = config.tolerance * (t - now) / total_t;
            state = sim.evolve(&state, t - now, seg_tol)?;
            now = t;
        }
        let x = sim.expectation(&state, Observable::X);
        let hz = sim.expectation(&state, Observable::Hz);
        let xvar = sim.expectation(&state, Observable::XMinusNSq);
        let hz_sq = sim.expectation_hz_sq(&state);
        rows.push(TraceRow {
            t,
            x,
            hz,
            h: x + g * hz,
            xvar,
            duality_obs: sim.duality_observable(&state),
            hz_sq,
            hvar_lhs: xvar.max(0.0).sqrt(),
            hvar_rhs: g * (n_t.sqrt() + hz_sq.max(0.0).sqrt()),
        });
    }
    if now < config.t_final {
        let seg_tol = config.tolerance * (config.t_final - now) / total_t;
        state = sim.evolve(&state, config.t_final - now, seg_tol)?;
    }
    let assignments = state.sample_assignments(config.n_samples, config.seed);
    let sample_energies = assignments
        .iter()
        .map(|z| inst.evaluate(z).expect("sampled assignment length"))
        .collect();
    Ok(QuenchTrace {
        alpha: config.alpha,
        tolerance: config.tolerance,
        seed: config.seed,
        rows,
        samples: assignments.iter().map(|z| z.to_bitstring()).collect(),
        sample_energies,
    })
}
