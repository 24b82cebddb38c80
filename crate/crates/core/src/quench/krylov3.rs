//! Three-state Krylov restriction of H around the all-plus state.
//!
//! |0> is the all-plus state, |1> = c H_Z |0> with c = N_T^{-1/2}, and |2>
//! comes from Gram-Schmidt on H_Z |1>. Restricted to this basis H is
//! tridiagonal; the dense-mode coupling alpha = d/sqrt(N_T) makes the
//! off-diagonal H01 exactly 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;

use super::{QuenchSim, StateVector};

/// Coupling choice for the restriction.
#[derive(Debug, Clone, Copy)]
pub enum AlphaMode {
    /// alpha = d/sqrt(N_T), the normalization-free choice.
    Dense,
    Explicit(f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Krylov3Report {
    pub alpha: f64,
    /// Restricted Hamiltonian; 2x2 when degenerate.
    pub matrix: Vec<Vec<f64>>,
    /// Normalizer of |1>: (<0|H_Z^2|0>)^{-1/2}.
    pub c: f64,
    /// Normalizer of the Gram-Schmidt residual building |2>.
    pub d_coeff: f64,
    /// Coefficient of |0> in |2> = d_coeff H_Z|1> + f_coeff |1> + e |0>.
    pub e: f64,
    pub f_coeff: f64,
    /// True when H_Z|1> lies in span{|0>,|1>} and only a 2x2 block exists.
    pub degenerate: bool,
    /// <H_Z^3> in the all-plus state.
    pub hz_third_moment: f64,
    /// Third-moment bound 2^{3k/2} N_T^{3/2}; the moment must stay within.
    pub third_moment_bound: f64,
    /// |<0|H|2>|, which must vanish (tridiagonality).
    pub h02_abs: f64,
}

pub fn krylov3(inst: &Instance, mode: AlphaMode, limit: usize) -> Result<Krylov3Report> {
    let n_t = inst.num_terms() as f64;
    if inst.num_terms() == 0 {
        return Err(Error::Input("instance has no terms".into()));
    }
    let alpha = match mode {
        AlphaMode::Dense => inst.d as f64 / n_t.sqrt(),
        AlphaMode::Explicit(a) => a,
    };
    let sim = QuenchSim::new(inst, alpha, limit)?;
    let v0 = sim.plus_state();
    let hz_v0 = sim.apply_hz(&v0);
    let norm1_sq = hz_v0.norm_sq();
    let c = 1.0 / norm1_sq.sqrt();
    let v1 = scale(&hz_v0, c);

    let w = sim.apply_hz(&v1);
    let g1 = v1.dot(&w).re;
    let g0 = v0.dot(&w).re;
    let mut resid = w.clone();
    axpy(&mut resid, &v1, -g1);
    axpy(&mut resid, &v0, -g0);
    let r = resid.norm_sq().sqrt();

    let hz_third_moment = {
        let diag = sim.diag();
        let dim = diag.len() as f64;
        diag.iter().map(|&e| (e as f64).powi(3)).sum::<f64>() / dim
    };
    let third_moment_bound = 2f64.powf(1.5 * inst.k as f64) * n_t.powf(1.5);

    let entry = |a: &StateVector, b: &StateVector| sim.apply_h(b).dot(a).conj().re;

    // H_Z|1> degenerate in span{|0>,|1>}: report the 2x2 block
    if r < 1e-9 * norm1_sq.sqrt().max(1.0) {
        let matrix = vec![
            vec![entry(&v0, &v0), entry(&v0, &v1)],
            vec![entry(&v1, &v0), entry(&v1, &v1)],
        ];
        return Ok(Krylov3Report {
            alpha,
            matrix,
            c,
            d_coeff: 0.0,
            e: 0.0,
            f_coeff: 0.0,
            degenerate: true,
            hz_third_moment,
            third_moment_bound,
            h02_abs: 0.0,
        });
    }

    let v2 = scale(&resid, 1.0 / r);
    let basis = [&v0, &v1, &v2];
    let mut matrix = vec![vec![0.0; 3]; 3];
    for (a, va) in basis.iter().enumerate() {
        for (b, vb) in basis.iter().enumerate() {
            matrix[a][b] = entry(va, vb);
        }
    }
    let h02_abs = matrix[0][2].abs().max(matrix[2][0].abs());
    Ok(Krylov3Report {
        alpha,
        matrix,
        c,
        d_coeff: 1.0 / r,
        e: -g0 / r,
        f_coeff: -g1 / r,
        degenerate: false,
        hz_third_moment,
        third_moment_bound,
        h02_abs,
    })
}

fn scale(v: &StateVector, s: f64) -> StateVector {
    StateVector {
        n: v.n,
        amps: v.amps.iter().map(|a| a * s).collect(),
    }
}

fn axpy(target: &mut StateVector, v: &StateVector, s: f64) {
    for (t, a) in target.amps.iter_mut().zip(&v.amps) {
        *t += a * s;
    }
}
