//! Mean-field product-state scan.
//!
//! The product state with Bloch vectors (cos t, 0, z_i sin t) has
//! <X> = n cos t and <H_Z> = sin^k(t) H(z) in closed form; no statevector
//! is needed, but one is built as a cross-check at small n.

use serde::Serialize;

use crate::error::Result;
use crate::instance::{Assignment, Instance};

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldPoint {
    pub theta: f64,
    pub x: f64,
    pub hz: f64,
}

/// Closed-form (theta, <X>, <H_Z>) curve for the product-state family
/// anchored at the assignment `z`.
pub fn mean_field_scan(
    inst: &Instance,
    z: &Assignment,
    thetas: &[f64],
) -> Result<Vec<MeanFieldPoint>> {
    let base = inst.evaluate(z)? as f64;
    Ok(thetas
        .iter()
        .map(|&theta| MeanFieldPoint {
            theta,
            x: inst.n as f64 * theta.cos(),
            hz: theta.sin().powi(inst.k as i32) * base,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quench::{Observable, QuenchSim, StateVector};
    use crate::rng::{self, rng_from_seed};
    use num_complex::Complex64;

    /// Explicit product state with <X_i> = cos t, <Z_i> = z_i sin t.
    fn product_state(z: &Assignment, theta: f64) -> StateVector {
        let s = 1.0 / 2f64.sqrt();
        let spinors: Vec<[Complex64; 2]> = z
            .spins
            .iter()
            .map(|&zi| {
                // cos(t/2)|+> + z_i sin(t/2)|->
                let c = (theta / 2.0).cos();
                let d = zi as f64 * (theta / 2.0).sin();
                [
                    Complex64::new(s * (c + d), 0.0),
                    Complex64::new(s * (c - d), 0.0),
                ]
            })
            .collect();
        StateVector::product(&spinors)
    }

    #[test]
    fn endpoints() {
        let inst = Instance::random_regular(10, 3, 3, 70).unwrap();
        let z = Assignment::all_plus(10);
        let pts = mean_field_scan(&inst, &z, &[0.0, std::f64::consts::FRAC_PI_2]).unwrap();
        assert_eq!(pts[0].x, 10.0);
        assert_eq!(pts[0].hz, 0.0);
        assert!(pts[1].x.abs() < 1e-12);
        assert!((pts[1].hz - inst.evaluate(&z).unwrap() as f64).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_statevector() {
        let inst = Instance::random_regular(10, 3, 3, 71).unwrap();
        let sim = QuenchSim::new(&inst, 1.0, 20).unwrap();
        let mut rng = rng_from_seed(72);
        let z = Assignment::new((0..10).map(|_| rng::uniform_sign(&mut rng)).collect()).unwrap();
        for _ in 0..20 {
            let theta = rng::uniform01(&mut rng) * std::f64::consts::PI;
            let pt = &mean_field_scan(&inst, &z, &[theta]).unwrap()[0];
            let state = product_state(&z, theta);
            let x = sim.expectation(&state, Observable::X);
            let hz = sim.expectation(&state, Observable::Hz);
            assert!((pt.x - x).abs() < 1e-10, "theta {theta}: x {x} vs {}", pt.x);
            assert!(
                (pt.hz - hz).abs() < 1e-10,
                "theta {theta}: hz {hz} vs {}",
                pt.hz
            );
        }
    }
}
