//! Canonical fixtures shared by the benchmark targets.

use maxklin_core::Instance;

/// Medium random instance exercising the evaluation and solver kernels.
pub fn solver_instance() -> Instance {
    Instance::random_regular(120, 3, 9, 2024).expect("feasible parameters")
}

/// Instance sized for exhaustive enumeration benchmarks.
pub fn enumeration_instance() -> Instance {
    Instance::random_regular(20, 4, 3, 2024).expect("feasible parameters")
}

/// Instance sized for statevector propagation benchmarks.
pub fn quench_instance() -> Instance {
    Instance::random_regular(12, 3, 6, 2024).expect("feasible parameters")
}
