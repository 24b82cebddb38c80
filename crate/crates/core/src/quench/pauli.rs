//! Signed Pauli strings applied on the fly; never materialized as matrices.
//!
//! Only Y/Z strings appear here. On a basis state, a Z factor contributes
//! its spin sign and a Y factor flips the bit with phase i*(-1)^bit. The
//! Heisenberg derivative of the force, dF_i/dt = -i[F_i, H], reduces to a
//! commutator with the transverse field (F_i is diagonal): every force
//! monomial spawns one string per participating spin, with the Z at that
//! spin replaced by a Y and an overall factor 2.

use num_complex::Complex64;

use crate::instance::Instance;

use super::StateVector;

/// coeff * prod_{b in y_mask} Y_b * prod_{j in z_mask} Z_j, with disjoint
/// masks.
#[derive(Debug, Clone)]
pub struct PauliString {
    pub coeff: f64,
    pub y_mask: u64,
    pub z_mask: u64,
}

impl PauliString {
    /// Phase picked up on basis index `idx` (the Z part and the Y sign
    /// part), excluding the bit flip itself.
    #[inline]
    fn phase(&self, idx: u64) -> Complex64 {
        let z_parity = (idx & self.z_mask).count_ones() & 1;
        let y_parity = (idx & self.y_mask).count_ones() & 1;
        let y_count = self.y_mask.count_ones();
        let sign = if (z_parity + y_parity) & 1 == 0 {
            1.0
        } else {
            -1.0
        };
        // i^{#Y}
        let unit = match y_count & 3 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        unit * sign * self.coeff
    }
}

/// Accumulate (sum of strings) * psi into a fresh vector.
pub fn apply_strings(strings: &[PauliString], state: &StateVector) -> StateVector {
    let mut out = vec![Complex64::new(0.0, 0.0); state.amps.len()];
    for s in strings {
        for (idx, a) in state.amps.iter().enumerate() {
            let target = idx ^ s.y_mask as usize;
            out[target] += s.phase(idx as u64) * a;
        }
    }
    StateVector {
        n: state.n,
        amps: out,
    }
}

/// <psi| (sum of strings) |psi>.
pub fn strings_expectation(strings: &[PauliString], state: &StateVector) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for s in strings {
        for (idx, a) in state.amps.iter().enumerate() {
            let target = idx ^ s.y_mask as usize;
            total += state.amps[target].conj() * s.phase(idx as u64) * a;
        }
    }
    total.re
}

/// Strings of dF_i/dt: for every term containing i and every other spin b in
/// it, a string 2*sign * Y_b * Z over the remaining spins of the term.
pub fn force_derivative_strings(inst: &Instance, i: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(inst.terms_of(i).len() * (inst.k - 1));
    for &t in inst.terms_of(i) {
        let term = &inst.terms[t as usize];
        let full: u64 = term.idx.iter().fold(0u64, |m, &j| m | 1 << j);
        for &b in &term.idx {
            if b as usize == i {
                continue;
            }
            let y_mask = 1u64 << b;
            out.push(PauliString {
                coeff: 2.0 * term.sign as f64,
                y_mask,
                z_mask: full & !y_mask & !(1 << i),
            });
        }
    }
    out
}

/// Strings of Y_i * dF_i/dt: the force-derivative strings with Y_i joined in.
pub fn y_force_derivative_strings(inst: &Instance, i: usize) -> Vec<PauliString> {
    force_derivative_strings(inst, i)
        .into_iter()
        .map(|mut s| {
            s.y_mask |= 1 << i;
            s
        })
        .collect()
}

/// <psi| Y_i dF_i/dt |psi>.
pub fn y_force_derivative_expectation(inst: &Instance, i: usize, state: &StateVector) -> f64 {
    strings_expectation(&y_force_derivative_strings(inst, i), state)
}
