//! Shared fixtures for the actuator benchmarks.

use vssea_core::dynamics::ActuatorParams;
use vssea_core::{BeamSpec, VsamConfig};

/// The beam used across the solver benchmarks.
pub fn bench_beam() -> BeamSpec {
    BeamSpec::new(200e9, 1e-11, 0.1).expect("valid beam")
}

/// Calibrated default mechanism.
pub fn bench_vsam() -> VsamConfig {
    VsamConfig::default_calibrated()
}

/// Calibrated default plant.
pub fn bench_params() -> ActuatorParams {
    ActuatorParams::default_calibrated()
}
