pub mod bench;
pub mod gen;
pub mod oracle_cmd;
pub mod quench_cmd;
pub mod solve;

use std::path::Path;

use maxklin_core::Instance;

use crate::{AppError, AppResult};

/// Load and validate an instance file; any failure is an input error.
pub fn load_instance(path: &Path) -> AppResult<Instance> {
    if !path.exists() {
        return Err(AppError::input(format!(
            "instance file not found: {}",
            path.display()
        )));
    }
    Instance::read_file(path).map_err(|e| AppError::input(e.to_string()))
}
