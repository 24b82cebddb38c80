//! Short-iterative Lanczos propagator with adaptive step control.
//!
//! Each step projects H onto a small Krylov subspace (full
//! reorthogonalization, so the basis stays orthonormal to machine
//! precision), exponentiates the tridiagonal projection through its
//! eigendecomposition, and accepts the step only when the standard residual
//! estimate beta_m * |last component| * dt fits the per-step budget. H is
//! real symmetric, so the projection coefficients are real.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{QuenchSim, StateVector};

const KRYLOV_DIM: usize = 28;
const MAX_STEPS: usize = 200_000;
const BREAKDOWN: f64 = 1e-13;

pub fn evolve(sim: &QuenchSim, state: &StateVector, t: f64, tolerance: f64) -> Result<StateVector> {
    if t < 0.0 {
        return Err(Error::Input("evolution time must be >= 0".into()));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let tolerance = tolerance.max(1e-15);
    let mut psi = state.clone();
    let mut remaining = t;
    let mut dt = t.min(1.0);
    let mut steps = 0usize;
    while remaining > 1e-15 * t {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Propagation(format!(
                "step budget exhausted: {steps} steps, {remaining:.3e} of {t} left, dt = {dt:.3e}"
            )));
        }
        let dt_try = dt.min(remaining);
        let budget = tolerance * dt_try / t;
        match lanczos_step(sim, &psi, dt_try, budget)? {
            StepOutcome::Accepted { next, err } => {
                psi = next;
                remaining -= dt_try;
                // grow cautiously when the estimate leaves headroom
                if err < 0.1 * budget {
                    dt *= 1.5;
                }
            }
            StepOutcome::Rejected => {
                dt *= 0.5;
                if dt < 1e-12 {
                    return Err(Error::Propagation(format!(
                        "step size underflow at t = {:.6} (tolerance {tolerance:.3e})",
                        t - remaining
                    )));
                }
            }
        }
    }
    Ok(psi)
}

enum StepOutcome {
    Accepted { next: StateVector, err: f64 },
    Rejected,
}

fn lanczos_step(sim: &QuenchSim, psi: &StateVector, dt: f64, budget: f64) -> Result<StepOutcome> {
    let norm0 = psi.norm_sq().sqrt();
    if norm0 < 1e-300 {
        return Err(Error::Propagation("zero state".into()));
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(KRYLOV_DIM);
    basis.push(psi.amps.iter().map(|a| a / norm0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(KRYLOV_DIM);
    let mut betas: Vec<f64> = Vec::with_capacity(KRYLOV_DIM);
    let mut happy = false;

    for j in 0..KRYLOV_DIM {
        let mut w = sim.apply_h_amps(&basis[j]);
        let alpha: f64 = w
            .iter()
            .zip(&basis[j])
            .map(|(wi, vi)| (vi.conj() * wi).re)
            .sum();
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * alpha;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * beta_prev;
            }
        }
        // full reorthogonalization keeps the subspace clean for small m
        for prev in &basis {
            let overlap: Complex64 = prev.iter().zip(&w).map(|(p, wi)| p.conj() * wi).sum();
            for (wi, p) in w.iter_mut().zip(prev) {
                *wi -= p * overlap;
            }
        }
        let beta: f64 = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        betas.push(beta);
        if beta < BREAKDOWN {
            happy = true;
            break;
        }
        if j + 1 < KRYLOV_DIM {
            for wi in w.iter_mut() {
                *wi /= beta;
            }
            basis.push(w);
        }
    }

    let m = alphas.len();
    // u = exp(-i dt T) e_1 via the eigendecomposition of the tridiagonal T
    let mut tmat = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        tmat[(j, j)] = alphas[j];
        if j + 1 < m {
            tmat[(j, j + 1)] = betas[j];
            tmat[(j + 1, j)] = betas[j];
        }
    }
    let eig = tmat.symmetric_eigen();
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -dt * lambda);
        let q0 = eig.eigenvectors[(0, col)];
        for (row, ui) in u.iter_mut().enumerate() {
            *ui += eig.eigenvectors[(row, col)] * q0 * phase;
        }
    }

    let err = if happy {
        0.0
    } else {
        betas[m - 1] * u[m - 1].norm() * dt
    };
    if err > budget {
        return Ok(StepOutcome::Rejected);
    }

    let mut next = vec![Complex64::new(0.0, 0.0); psi.amps.len()];
    for (j, coeff) in u.iter().enumerate() {
        let scaled = coeff * norm0;
        for (ni, vi) in next.iter_mut().zip(&basis[j]) {
            *ni += vi * scaled;
        }
    }
    Ok(StepOutcome::Accepted {
        next: StateVector {
            n: psi.n,
            amps: next,
        },
        err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use crate::quench::Observable;
    use nalgebra::DMatrix;

    /// Dense reference: diagonalize H at n <= 6 and evolve exactly.
    fn dense_evolve(sim: &QuenchSim, state: &StateVector, t: f64) -> StateVector {
        let dim = state.amps.len();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for idx in 0..dim {
            h[(idx, idx)] = sim.coupling() * sim.diag()[idx] as f64;
            for b in 0..state.n {
                h[(idx, idx ^ (1 << b))] += 1.0;
            }
        }
        let eig = h.symmetric_eigen();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -t * lambda);
            let overlap: Complex64 = (0..dim)
                .map(|row| eig.eigenvectors[(row, col)] * state.amps[row])
                .sum();
            for (row, o) in out.iter_mut().enumerate() {
                *o += eig.eigenvectors[(row, col)] * overlap * phase;
            }
        }
        StateVector {
            n: state.n,
            amps: out,
        }
    }

    #[test]
    fn matches_dense_reference() {
        let inst = Instance::random_regular(6, 2, 3, 9).unwrap();
        let sim = QuenchSim::new(&inst, 2.0, 20).unwrap();
        let psi0 = sim.plus_state();
        for &t in &[0.1, 0.5, 1.7] {
            let krylov = sim.evolve(&psi0, t, 1e-12).unwrap();
            let dense = dense_evolve(&sim, &psi0, t);
            let diff: f64 = krylov
                .amps
                .iter()
                .zip(&dense.amps)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-10, "t={t}: diff {diff}");
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let inst = Instance::antiferromagnet(4).unwrap();
        let sim = QuenchSim::new(&inst, 1.0, 20).unwrap();
        let psi = sim.plus_state();
        let out = sim.evolve(&psi, 0.0, 1e-10).unwrap();
        for (a, b) in out.amps.iter().zip(&psi.amps) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn norm_and_energy_preserved() {
        let inst = Instance::random_regular(10, 3, 3, 14).unwrap();
        let sim = QuenchSim::new(&inst, 4.0, 20).unwrap();
        let psi0 = sim.plus_state();
        let psi = sim.evolve(&psi0, 2.0, 1e-12).unwrap();
        assert!((psi.norm_sq() - 1.0).abs() < 1e-10);
        let h = sim.expectation(&psi, Observable::H);
        assert!((h - 10.0).abs() < 1e-9 * 10.0, "h = {h}");
    }

    #[test]
    fn segmented_evolution_matches_single_shot() {
        let inst = Instance::random_regular(8, 2, 3, 3).unwrap();
        let sim = QuenchSim::new(&inst, 1.0, 20).unwrap();
        let psi0 = sim.plus_state();
        let direct = sim.evolve(&psi0, 1.0, 1e-12).unwrap();
        let mut seg = psi0.clone();
        for _ in 0..4 {
            seg = sim.evolve(&seg, 0.25, 2.5e-13).unwrap();
        }
        let diff: f64 = direct
            .amps
            .iter()
            .zip(&seg.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-11, "diff {diff}");
    }

    #[test]
    fn tolerance_refinement_is_stable() {
        let inst = Instance::random_regular(9, 3, 2, 5).unwrap();
        let sim = QuenchSim::new(&inst, 2.0, 20).unwrap();
        let psi0 = sim.plus_state();
        let coarse = sim.evolve(&psi0, 1.0, 1e-6).unwrap();
        let fine = sim.evolve(&psi0, 1.0, 1e-8).unwrap();
        let x_coarse = sim.expectation(&coarse, Observable::X);
        let x_fine = sim.expectation(&fine, Observable::X);
        assert!((x_coarse - x_fine).abs() < 1e-6);
    }
}
