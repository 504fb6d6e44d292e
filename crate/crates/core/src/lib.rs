//! Simulation library for a variable-stiffness series elastic actuator.
//!
//! The actuator couples a geared position motor to an output link through a
//! stage of radially arranged leaf springs. A second, direct-drive motor moves
//! rollers along the springs through a ball screw, changing the active bending
//! length and therefore the joint stiffness. This crate models that machine:
//!
//! - [`beam`] — planar large-deflection cantilever statics for one leaf
//!   spring (exact elastica) plus the linear small-deflection law;
//! - [`vsam`] — mechanism statics: roller kinematics, joint torque, tangent
//!   stiffness, stiffness-motor disturbance torque, stored energy, and
//!   calibration against target stiffness endpoints;
//! - [`dynamics`] — the coupled three-inertia equations of motion under
//!   torque saturation, integrated with fixed-step RK4;
//! - [`control`] — discrete PID controllers with anti-windup and the named
//!   gain presets used by the experiment scenarios;
//! - [`experiments`] — a catalog of closed-loop scenarios (position, force,
//!   and stiffness-modulation experiments) with logged time series & metrics;
//! - [`config`] / [`csv_io`] — flat dotted-key run configuration and the CSV
//!   output schema;
//! - [`validation`] — independent reference implementations (shooting-method
//!   elastica oracle) and self-check routines for the `validate` command.

// Parameter validation uses negated comparisons on purpose: `!(x > 0.0)`
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod config;
pub mod control;
pub mod csv_io;
pub mod dynamics;
pub mod experiments;
mod quadrature;
pub mod validation;
pub mod vsam;

pub use beam::{BeamError, BeamSpec, ElasticaSolution, SolverSettings};
pub use config::{ConfigError, ConfigLayer, RunConfig};
pub use control::{ControlTarget, ControllerPreset, PidGains, PidState};
pub use dynamics::{
    ActuatorParams, DisturbanceProfile, DynamicsError, Schedule, SimState, StateDerivative,
};
pub use experiments::{
    EnergyReport, ExperimentError, Metrics, Scenario, ScenarioResult, SweepRow, SweepTable,
};
pub use vsam::{CalibrationTargets, RollerPosition, StiffnessModel, VsamConfig, VsamError};
