//! Closed-loop experiment scenarios and static model sweeps.
//!
//! A [`Scenario`] wires one controller to the position motor (gear angle,
//! link angle, or link deflection), a position servo to the stiffness motor,
//! reference generators for both, and an external disturbance profile. The
//! controllers run on the control grid with zero-order hold; the plant
//! integrates on a finer physics grid. Every run logs the full channel set on
//! the control grid and reduces it to scalar metrics.

mod catalog;

pub use catalog::scenario_catalog;

use crate::control::{self, ControlTarget, PidGains, PidState};
use crate::dynamics::{self, ActuatorParams, DisturbanceProfile, DynamicsError, SimState};
use crate::vsam::{self, StiffnessModel, VsamConfig, VsamError};
use thiserror::Error;

/// Reference generator for the position-motor loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motor1Reference {
    /// Constant setpoint.
    Hold(f64),
    /// Raised-cosine blend from `from` to `to` over `rise` seconds.
    SmoothStep {
        start: f64,
        from: f64,
        to: f64,
        rise: f64,
    },
    /// `K (1 - cos(2 pi f (t - 1)))` tracking trajectory.
    Track { amplitude: f64, frequency: f64 },
}

impl Motor1Reference {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            Motor1Reference::Hold(value) => (value, 0.0),
            Motor1Reference::SmoothStep {
                start,
                from,
                to,
                rise,
            } => smooth_blend(t, start, from, to, rise),
            Motor1Reference::Track {
                amplitude,
                frequency,
            } => control::reference_trajectory(amplitude, frequency, t),
        }
    }
}

/// Reference generator for the stiffness motor, expressed as a roller
/// position along the springs (m); the executor converts through the screw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motor2Reference {
    HoldRoller(f64),
    /// Half-cosine oscillation between two roller stations.
    SineRoller {
        x_start: f64,
        x_end: f64,
        frequency: f64,
        start: f64,
    },
    /// Smoothed square wave between two stations: dwell at each end with
    /// raised-cosine transitions of `rise` seconds, full period `period`.
    SmoothSquareRoller {
        x_a: f64,
        x_b: f64,
        period: f64,
        rise: f64,
        start: f64,
    },
}

impl Motor2Reference {
    /// Roller position and rate at time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            Motor2Reference::HoldRoller(x) => (x, 0.0),
            Motor2Reference::SineRoller {
                x_start,
                x_end,
                frequency,
                start,
            } => {
                if t < start {
                    return (x_start, 0.0);
                }
                let mid = 0.5 * (x_start + x_end);
                let amp = 0.5 * (x_start - x_end);
                let omega = std::f64::consts::TAU * frequency;
                let phase = omega * (t - start);
                (mid + amp * phase.cos(), -amp * omega * phase.sin())
            }
            Motor2Reference::SmoothSquareRoller {
                x_a,
                x_b,
                period,
                rise,
                start,
            } => {
                if t < start {
                    return (x_a, 0.0);
                }
                let phase = (t - start) % period;
                let half = 0.5 * period;
                if phase < rise {
                    smooth_blend(phase, 0.0, x_a, x_b, rise)
                } else if phase < half {
                    (x_b, 0.0)
                } else if phase < half + rise {
                    smooth_blend(phase, half, x_b, x_a, rise)
                } else {
                    (x_a, 0.0)
                }
            }
        }
    }
}

fn smooth_blend(t: f64, start: f64, from: f64, to: f64, rise: f64) -> (f64, f64) {
    if t <= start {
        return (from, 0.0);
    }
    if t >= start + rise {
        return (to, 0.0);
    }
    let s = (t - start) / rise;
    let span = to - from;
    let value = from + 0.5 * span * (1.0 - (std::f64::consts::PI * s).cos());
    let rate = 0.5 * span * std::f64::consts::PI / rise * (std::f64::consts::PI * s).sin();
    (value, rate)
}

/// One controller slot: loop target, gains, and the scale from controller
/// output to shaft torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerAssignment {
    pub target: ControlTarget,
    pub gains: PidGains,
    pub drive_scale: f64,
}

/// A fully specified closed-loop experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub params: ActuatorParams,
    pub motor1: ControllerAssignment,
    pub motor1_reference: Motor1Reference,
    pub motor2: ControllerAssignment,
    pub motor2_reference: Motor2Reference,
    pub disturbances: DisturbanceProfile,
    pub duration: f64,
    pub physics_dt: f64,
    pub control_dt: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.params
            .validate()
            .map_err(|e| ExperimentError::ConfigInvalid(e.to_string()))?;
        if !(self.duration > 0.0) {
            return Err(ExperimentError::ConfigInvalid(
                "duration must be positive".into(),
            ));
        }
        if !(self.physics_dt > 0.0) || !(self.control_dt > 0.0) {
            return Err(ExperimentError::ConfigInvalid(
                "time steps must be positive".into(),
            ));
        }
        let ratio = self.control_dt / self.physics_dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio || ratio < 1.0 {
            return Err(ExperimentError::ConfigInvalid(
                "control_dt must be an integer multiple of physics_dt".into(),
            ));
        }
        if self.motor1.target == ControlTarget::StiffnessMotorPosition {
            return Err(ExperimentError::ConfigInvalid(
                "motor 1 cannot run the stiffness loop".into(),
            ));
        }
        if self.motor2.target != ControlTarget::StiffnessMotorPosition {
            return Err(ExperimentError::ConfigInvalid(
                "motor 2 must run the stiffness loop".into(),
            ));
        }
        self.motor1
            .gains
            .validate()
            .map_err(|e| ExperimentError::ConfigInvalid(e.to_string()))?;
        self.motor2
            .gains
            .validate()
            .map_err(|e| ExperimentError::ConfigInvalid(e.to_string()))?;
        Ok(())
    }

    /// Initial state: at rest on the t = 0 references.
    fn initial_state(&self) -> SimState {
        let (r1, _) = self.motor1_reference.eval(0.0);
        let (x0, _) = self.motor2_reference.eval(0.0);
        let q_m2 = x0 / self.params.vsam.eta();
        let n = self.params.gear_ratio;
        match self.motor1.target {
            ControlTarget::MotorPosition | ControlTarget::LinkPosition => {
                SimState::at_rest(n * r1, r1, q_m2)
            }
            // Deflection loops start at the undeflected equilibrium; the
            // reference is expected to blend away from zero.
            ControlTarget::Deflection => SimState::at_rest(0.0, r1, q_m2),
            ControlTarget::StiffnessMotorPosition => unreachable!("rejected by validate"),
        }
    }
}

/// Scalar reductions of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// RMS tracking error of the motor-1 controlled variable.
    pub rms_error: f64,
    /// Peak signed exceedance past the reference endpoint (rad); peak
    /// absolute deviation for constant references.
    pub max_overshoot: f64,
    /// First time after which the error stays inside the 2% band (s);
    /// duration if it never settles.
    pub settling_time: f64,
    /// Peak |tau_s_dis| over the run (Nm).
    pub peak_disturbance_torque: f64,
    /// Positive-part integral of stiffness-motor mechanical power (J).
    pub energy_cost: f64,
}

/// Logged time series on the control grid plus metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub name: String,
    pub time: Vec<f64>,
    pub q_m1: Vec<f64>,
    pub q_g: Vec<f64>,
    pub q_l: Vec<f64>,
    pub q_m2: Vec<f64>,
    pub qd_m1: Vec<f64>,
    pub qd_l: Vec<f64>,
    pub qd_m2: Vec<f64>,
    pub tau_m1_cmd: Vec<f64>,
    pub tau_m2_cmd: Vec<f64>,
    pub tau_s: Vec<f64>,
    pub tau_s_dis: Vec<f64>,
    pub stiffness: Vec<f64>,
    pub stored_energy: Vec<f64>,
    pub m2_energy_cost: Vec<f64>,
    pub metrics: Metrics,
}

impl ScenarioResult {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("scenario configuration invalid: {0}")]
    ConfigInvalid(String),
    #[error("simulation diverged at t = {time:.6} s")]
    SimulationDiverged { time: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Vsam(#[from] VsamError),
}

fn measure(target: ControlTarget, params: &ActuatorParams, state: &SimState) -> (f64, f64) {
    let n = params.gear_ratio;
    match target {
        ControlTarget::MotorPosition => (state.q_m1 / n, state.qd_m1 / n),
        ControlTarget::LinkPosition => (state.q_l, state.qd_l),
        ControlTarget::Deflection => (state.q_l - state.q_m1 / n, state.qd_l - state.qd_m1 / n),
        ControlTarget::StiffnessMotorPosition => (state.q_m2, state.qd_m2),
    }
}

/// Run one scenario to completion.
///
/// Deterministic: identical scenarios produce bit-identical series. Commands
/// are computed on the control grid and held; the energy cost accumulates on
/// the physics grid as `max(tau_m2 qd_m2, 0) dt`.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioResult, ExperimentError> {
    scenario.validate()?;
    let params = &scenario.params;
    let substeps = (scenario.control_dt / scenario.physics_dt).round() as usize;
    let steps = (scenario.duration / scenario.control_dt).round() as usize;
    let eta = params.vsam.eta();

    let mut state = scenario.initial_state();
    let mut pid1 = PidState::default();
    let mut pid2 = PidState::default();
    let mut cost = 0.0;
    let mut result = ScenarioResult {
        name: scenario.name.clone(),
        time: Vec::with_capacity(steps + 1),
        q_m1: Vec::with_capacity(steps + 1),
        q_g: Vec::with_capacity(steps + 1),
        q_l: Vec::with_capacity(steps + 1),
        q_m2: Vec::with_capacity(steps + 1),
        qd_m1: Vec::with_capacity(steps + 1),
        qd_l: Vec::with_capacity(steps + 1),
        qd_m2: Vec::with_capacity(steps + 1),
        tau_m1_cmd: Vec::with_capacity(steps + 1),
        tau_m2_cmd: Vec::with_capacity(steps + 1),
        tau_s: Vec::with_capacity(steps + 1),
        tau_s_dis: Vec::with_capacity(steps + 1),
        stiffness: Vec::with_capacity(steps + 1),
        stored_energy: Vec::with_capacity(steps + 1),
        m2_energy_cost: Vec::with_capacity(steps + 1),
        metrics: Metrics {
            rms_error: 0.0,
            max_overshoot: 0.0,
            settling_time: 0.0,
            peak_disturbance_torque: 0.0,
            energy_cost: 0.0,
        },
    };

    for k in 0..=steps {
        let t = k as f64 * scenario.control_dt;
        let (r1, r1_rate) = scenario.motor1_reference.eval(t);
        let (m1, m1_rate) = measure(scenario.motor1.target, params, &state);
        let (u1, next_pid1) =
            control::pid_update(&scenario.motor1.gains, pid1, r1, r1_rate, m1, m1_rate);
        let tau1 = u1 * scenario.motor1.drive_scale;

        let (x_ref, x_rate) = scenario.motor2_reference.eval(t);
        let (m2, m2_rate) = measure(scenario.motor2.target, params, &state);
        let (u2, next_pid2) = control::pid_update(
            &scenario.motor2.gains,
            pid2,
            x_ref / eta,
            x_rate / eta,
            m2,
            m2_rate,
        );
        let tau2 = u2 * scenario.motor2.drive_scale;

        let observables = dynamics::spring_observables(params, &state)?;
        result.time.push(t);
        result.q_m1.push(state.q_m1);
        result.q_g.push(state.q_g(params));
        result.q_l.push(state.q_l);
        result.q_m2.push(state.q_m2);
        result.qd_m1.push(state.qd_m1);
        result.qd_l.push(state.qd_l);
        result.qd_m2.push(state.qd_m2);
        result.tau_m1_cmd.push(tau1);
        result.tau_m2_cmd.push(tau2);
        result.tau_s.push(observables.tau_s);
        result.tau_s_dis.push(observables.tau_s_dis);
        result.stiffness.push(observables.stiffness);
        result.stored_energy.push(observables.stored_energy);
        result.m2_energy_cost.push(cost);

        if k == steps {
            break;
        }
        pid1 = next_pid1;
        pid2 = next_pid2;
        for _ in 0..substeps {
            cost += dynamics::mechanical_power_m2(&state, tau2).max(0.0) * scenario.physics_dt;
            state = dynamics::step(
                params,
                &state,
                tau1,
                tau2,
                &scenario.disturbances,
                scenario.physics_dt,
            )
            .map_err(|e| match e {
                DynamicsError::NonFiniteState => {
                    ExperimentError::SimulationDiverged { time: state.time }
                }
                other => ExperimentError::Dynamics(other),
            })?;
        }
    }

    result.metrics = compute_metrics(scenario, &result);
    Ok(result)
}

/// Reduce a logged series to scalar metrics; pure in the series so the
/// numbers can be recomputed from the stored log.
pub fn compute_metrics(scenario: &Scenario, result: &ScenarioResult) -> Metrics {
    let params = &scenario.params;
    let n = params.gear_ratio;
    let controlled = |i: usize| -> f64 {
        match scenario.motor1.target {
            ControlTarget::MotorPosition => result.q_m1[i] / n,
            ControlTarget::LinkPosition => result.q_l[i],
            ControlTarget::Deflection => result.q_l[i] - result.q_m1[i] / n,
            ControlTarget::StiffnessMotorPosition => result.q_m2[i],
        }
    };

    let samples = result.time.len();
    let mut sum_sq = 0.0;
    let mut errors = Vec::with_capacity(samples);
    for i in 0..samples {
        let (reference, _) = scenario.motor1_reference.eval(result.time[i]);
        let error = controlled(i) - reference;
        sum_sq += error * error;
        errors.push(error);
    }
    let rms_error = if samples == 0 {
        0.0
    } else {
        (sum_sq / samples as f64).sqrt()
    };

    // Overshoot and settling band relative to the reference excursion.
    let (span, direction, maneuver_end) = match scenario.motor1_reference {
        Motor1Reference::Hold(_) => (0.0, 0.0, 0.0),
        Motor1Reference::SmoothStep {
            start,
            from,
            to,
            rise,
        } => (to - from, (to - from).signum(), start + rise),
        Motor1Reference::Track { amplitude, .. } => (2.0 * amplitude, 1.0, 1.0),
    };
    let max_overshoot = if direction == 0.0 {
        errors.iter().fold(0.0f64, |acc, e| acc.max(e.abs()))
    } else {
        result
            .time
            .iter()
            .zip(&errors)
            .filter(|(t, _)| **t >= maneuver_end)
            .fold(0.0f64, |acc, (_, e)| acc.max(direction * e))
    };

    let band = (0.02 * span.abs()).max(1e-6);
    let mut settling_time = 0.0;
    for i in (0..samples).rev() {
        if errors[i].abs() > band {
            settling_time = if i + 1 < samples {
                result.time[i + 1]
            } else {
                scenario.duration
            };
            break;
        }
    }

    let peak_disturbance_torque = result
        .tau_s_dis
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let energy_cost = result.m2_energy_cost.last().copied().unwrap_or(0.0);

    Metrics {
        rms_error,
        max_overshoot,
        settling_time,
        peak_disturbance_torque,
        energy_cost,
    }
}

/// One row of the static model-comparison sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub q_l: f64,
    pub x_r: f64,
    pub tau_ldm: f64,
    pub tau_sdm: f64,
    pub k_ldm: f64,
    pub k_sdm: f64,
}

/// Static sweep table over deflection and roller grids.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Dense static comparison of the two spring models over the work range.
pub fn compare_models_sweep(
    config: &VsamConfig,
    q_grid: &[f64],
    x_grid: &[f64],
) -> Result<SweepTable, ExperimentError> {
    let mut rows = Vec::with_capacity(q_grid.len() * x_grid.len());
    for &x_r in x_grid {
        let q_m2 = x_r / config.eta();
        for &q_l in q_grid {
            rows.push(SweepRow {
                q_l,
                x_r,
                tau_ldm: vsam::spring_torque(config, StiffnessModel::LargeDeflection, q_m2, q_l)?,
                tau_sdm: vsam::spring_torque(config, StiffnessModel::SmallDeflection, q_m2, q_l)?,
                k_ldm: vsam::stiffness(config, StiffnessModel::LargeDeflection, q_m2, q_l)?,
                k_sdm: vsam::stiffness(config, StiffnessModel::SmallDeflection, q_m2, q_l)?,
            });
        }
    }
    Ok(SweepTable { rows })
}

/// Default grids for the static sweep: 11 deflections across the admissible
/// range by 9 roller stations across the travel.
pub fn default_sweep_grids(config: &VsamConfig) -> (Vec<f64>, Vec<f64>) {
    let q_grid = (0..11)
        .map(|i| (i as f64 / 10.0 - 0.5) * 2.0 * config.deflection_limit)
        .collect();
    let x_grid = (0..9)
        .map(|i| config.x_min + (config.x_max - config.x_min) * i as f64 / 8.0)
        .collect();
    (q_grid, x_grid)
}

/// Energy accounting summary of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// Total positive-part stiffness-motor work (J).
    pub total_cost: f64,
    /// Peak spring potential energy over the run (J).
    pub peak_stored: f64,
    /// Spring potential at the final sample (J).
    pub final_stored: f64,
    /// total_cost / peak_stored, infinite if nothing was stored.
    pub cost_to_peak_stored: f64,
}

pub fn energy_report(result: &ScenarioResult) -> EnergyReport {
    let total_cost = result.metrics.energy_cost;
    let peak_stored = result
        .stored_energy
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v));
    EnergyReport {
        total_cost,
        peak_stored,
        final_stored: result.stored_energy.last().copied().unwrap_or(0.0),
        cost_to_peak_stored: if peak_stored > 0.0 {
            total_cost / peak_stored
        } else {
            f64::INFINITY
        },
    }
}
