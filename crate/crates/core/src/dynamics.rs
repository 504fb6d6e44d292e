//! Coupled three-inertia dynamics of the actuator.
//!
//! State: position motor `q_m1` (with the gearbox reflected through the ratio
//! N), output link `q_l`, stiffness motor `q_m2`. The spring stage couples
//! them: it pulls the link toward the equilibrium `q_g = q_m1 / N` with the
//! joint torque of [`crate::vsam`], reacts on the motor through the gear, and
//! loads the stiffness motor with the disturbance torque. Commanded torques
//! saturate at the shaft limits; external disturbances enter each row from a
//! [`DisturbanceProfile`]. Integration is fixed-step classic RK4 with
//! zero-order-hold commands.

use crate::vsam::{self, StiffnessModel, VsamConfig, VsamError};
use thiserror::Error;

/// Contact stiffness of the mechanical deflection stops (Nm/rad).
const STOP_STIFFNESS: f64 = 2e4;
/// Contact damping of the deflection stops (Nm s/rad), engaged past the limit.
const STOP_DAMPING: f64 = 50.0;

/// Inertias, dampings, gearing, and torque limits of the three-inertia plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorParams {
    /// Rotor inertia of the position motor (kg m^2).
    pub j_m1: f64,
    /// Gearbox inertia, motor side (kg m^2).
    pub j_g: f64,
    /// Rotor inertia of the stiffness motor (kg m^2).
    pub j_m2: f64,
    /// Output link inertia (kg m^2).
    pub j_l: f64,
    /// Viscous damping coefficients (Nm s/rad).
    pub b_m1: f64,
    pub b_g: f64,
    pub b_m2: f64,
    pub b_l: f64,
    /// Gear ratio N of the position-motor drivetrain.
    pub gear_ratio: f64,
    /// Shaft torque limits (Nm).
    pub tau_m1_max: f64,
    pub tau_m2_max: f64,
    pub vsam: VsamConfig,
    pub model: StiffnessModel,
}

impl ActuatorParams {
    /// Motor-side inertia with the gearbox reflected: `J_m1 + J_g / N^2`.
    pub fn effective_motor_inertia(&self) -> f64 {
        self.j_m1 + self.j_g / (self.gear_ratio * self.gear_ratio)
    }

    /// Motor-side damping with the gearbox reflected: `b_m1 + b_g / N^2`.
    pub fn effective_motor_damping(&self) -> f64 {
        self.b_m1 + self.b_g / (self.gear_ratio * self.gear_ratio)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        self.vsam.validate()?;
        let positive = [
            ("j_m1", self.j_m1),
            ("j_m2", self.j_m2),
            ("j_l", self.j_l),
            ("tau_m1_max", self.tau_m1_max),
            ("tau_m2_max", self.tau_m2_max),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(DynamicsError::InvalidParams(name));
            }
        }
        let non_negative = [
            ("j_g", self.j_g),
            ("b_m1", self.b_m1),
            ("b_g", self.b_g),
            ("b_m2", self.b_m2),
            ("b_l", self.b_l),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(DynamicsError::InvalidParams(name));
            }
        }
        if !(self.gear_ratio >= 1.0) {
            return Err(DynamicsError::InvalidParams("gear_ratio"));
        }
        Ok(())
    }

    /// Flat-motor defaults on the calibrated mechanism.
    ///
    /// The link damping lumps bearing and structural losses; it must exceed
    /// `kd_link J_l / (N^2 J_m1)` or the non-colocated link PID pumps the
    /// spring resonance.
    pub fn default_calibrated() -> Self {
        Self {
            j_m1: 1e-4,
            j_g: 1e-5,
            j_m2: 8e-5,
            j_l: 0.05,
            b_m1: 1e-4,
            b_g: 1e-4,
            b_m2: 1e-4,
            b_l: 1.0,
            gear_ratio: 100.0,
            tau_m1_max: 1.1,
            tau_m2_max: 0.8,
            vsam: VsamConfig::default_calibrated(),
            model: StiffnessModel::SmallDeflection,
        }
    }
}

/// Generalized positions and velocities at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub q_m1: f64,
    pub q_l: f64,
    pub q_m2: f64,
    pub qd_m1: f64,
    pub qd_l: f64,
    pub qd_m2: f64,
}

impl SimState {
    pub fn at_rest(q_m1: f64, q_l: f64, q_m2: f64) -> Self {
        Self {
            time: 0.0,
            q_m1,
            q_l,
            q_m2,
            qd_m1: 0.0,
            qd_l: 0.0,
            qd_m2: 0.0,
        }
    }

    /// Gear-side equilibrium angle q_g = q_m1 / N.
    pub fn q_g(&self, params: &ActuatorParams) -> f64 {
        self.q_m1 / params.gear_ratio
    }

    /// Link deflection relative to equilibrium.
    pub fn deflection(&self, params: &ActuatorParams) -> f64 {
        self.q_l - self.q_g(params)
    }

    pub fn is_finite(&self) -> bool {
        [
            self.time, self.q_m1, self.q_l, self.q_m2, self.qd_m1, self.qd_l, self.qd_m2,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Time derivative of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub qd_m1: f64,
    pub qd_l: f64,
    pub qd_m2: f64,
    pub qdd_m1: f64,
    pub qdd_l: f64,
    pub qdd_m2: f64,
}

/// Piecewise-linear schedule of a scalar versus time. Values are held flat
/// before the first and after the last breakpoint; duplicate times produce a
/// step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    points: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            points: vec![(0.0, value)],
        }
    }

    /// Breakpoints must be finite with non-decreasing times.
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self, DynamicsError> {
        for pair in points.windows(2) {
            if pair[1].0 < pair[0].0 {
                return Err(DynamicsError::InvalidParams(
                    "schedule times must not decrease",
                ));
            }
        }
        if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(DynamicsError::InvalidParams(
                "schedule values must be finite",
            ));
        }
        Ok(Self { points })
    }

    /// Zero until `onset`, then a linear rise over `rise` seconds to `level`.
    pub fn ramped_step(onset: f64, rise: f64, level: f64) -> Self {
        Self {
            points: vec![(0.0, 0.0), (onset, 0.0), (onset + rise, level)],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let points = &self.points;
        if points.is_empty() {
            return 0.0;
        }
        if t <= points[0].0 {
            return points[0].1;
        }
        if t >= points[points.len() - 1].0 {
            return points[points.len() - 1].1;
        }
        let idx = points.partition_point(|&(pt, _)| pt <= t);
        let (t0, v0) = points[idx - 1];
        let (t1, v1) = points[idx];
        if t1 == t0 {
            return v1;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|&(_, v)| v == 0.0)
    }
}

/// External disturbance torques applied to each row of the plant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DisturbanceProfile {
    /// Load torque on the link (the experiment's external load slot).
    pub link: Schedule,
    pub motor1: Schedule,
    pub motor2: Schedule,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state or derivative became non-finite")]
    NonFiniteState,
    #[error("invalid actuator parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Vsam(#[from] VsamError),
}

/// Spring-stage quantities at one state, evaluated with the deflection
/// clamped to the mechanical stop range (the stop reaction itself is handled
/// in [`derivatives`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringObservables {
    pub tau_s: f64,
    pub tau_s_dis: f64,
    pub stiffness: f64,
    pub stored_energy: f64,
}

pub fn spring_observables(
    params: &ActuatorParams,
    state: &SimState,
) -> Result<SpringObservables, DynamicsError> {
    let q_rel = clamp_deflection(params, state.deflection(params));
    let vsam = &params.vsam;
    Ok(SpringObservables {
        tau_s: vsam::spring_torque_unchecked(vsam, params.model, state.q_m2, q_rel)?,
        tau_s_dis: vsam::disturbance_torque_unchecked(vsam, params.model, state.q_m2, q_rel)?,
        stiffness: vsam::stiffness(vsam, params.model, state.q_m2, q_rel)?,
        stored_energy: vsam::stored_energy(vsam, params.model, state.q_m2, q_rel)?,
    })
}

fn clamp_deflection(params: &ActuatorParams, q_rel: f64) -> f64 {
    let limit = params.vsam.deflection_limit;
    q_rel.clamp(-limit, limit)
}

/// Equations of motion. Commanded torques are saturated at the shaft limits
/// here; the spring torque enters the motor row through +tau_s / N and the
/// link row through -tau_s (restoring for either sign of deflection), and the
/// disturbance torque loads the stiffness-motor row. Past the deflection
/// range a stiff stop contact keeps the simulation physical.
pub fn derivatives(
    params: &ActuatorParams,
    state: &SimState,
    tau_m1: f64,
    tau_m2: f64,
    disturbances: &DisturbanceProfile,
) -> Result<StateDerivative, DynamicsError> {
    if !state.is_finite() || !tau_m1.is_finite() || !tau_m2.is_finite() {
        return Err(DynamicsError::NonFiniteState);
    }
    let n = params.gear_ratio;
    let tau_m1 = tau_m1.clamp(-params.tau_m1_max, params.tau_m1_max);
    let tau_m2 = tau_m2.clamp(-params.tau_m2_max, params.tau_m2_max);

    let q_rel = state.q_l - state.q_m1 / n;
    let q_spring = clamp_deflection(params, q_rel);
    let tau_s = vsam::spring_torque_unchecked(&params.vsam, params.model, state.q_m2, q_spring)?;
    let tau_dis =
        vsam::disturbance_torque_unchecked(&params.vsam, params.model, state.q_m2, q_spring)?;

    // End-stop contact beyond the admissible deflection range.
    let overshoot = q_rel - q_spring;
    let tau_stop = if overshoot != 0.0 {
        STOP_STIFFNESS * overshoot + STOP_DAMPING * (state.qd_l - state.qd_m1 / n)
    } else {
        0.0
    };
    let tau_stage = tau_s + tau_stop;

    let t = state.time;
    let qdd_m1 = (tau_m1 - params.effective_motor_damping() * state.qd_m1 + tau_stage / n
        - disturbances.motor1.eval(t))
        / params.effective_motor_inertia();
    let qdd_l = (-tau_stage - params.b_l * state.qd_l - disturbances.link.eval(t)) / params.j_l;
    let qdd_m2 =
        (tau_m2 - params.b_m2 * state.qd_m2 - tau_dis - disturbances.motor2.eval(t)) / params.j_m2;

    let derivative = StateDerivative {
        qd_m1: state.qd_m1,
        qd_l: state.qd_l,
        qd_m2: state.qd_m2,
        qdd_m1,
        qdd_l,
        qdd_m2,
    };
    if [qdd_m1, qdd_l, qdd_m2].iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::NonFiniteState);
    }
    Ok(derivative)
}

/// One fixed-step classic RK4 step with the torque commands held constant.
pub fn step(
    params: &ActuatorParams,
    state: &SimState,
    tau_m1: f64,
    tau_m2: f64,
    disturbances: &DisturbanceProfile,
    dt: f64,
) -> Result<SimState, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::InvalidParams("dt must be positive"));
    }
    let eval = |time: f64, y: &[f64; 6]| -> Result<[f64; 6], DynamicsError> {
        let probe = SimState {
            time,
            q_m1: y[0],
            q_l: y[1],
            q_m2: y[2],
            qd_m1: y[3],
            qd_l: y[4],
            qd_m2: y[5],
        };
        let d = derivatives(params, &probe, tau_m1, tau_m2, disturbances)?;
        Ok([d.qd_m1, d.qd_l, d.qd_m2, d.qdd_m1, d.qdd_l, d.qdd_m2])
    };

    let y0 = [
        state.q_m1,
        state.q_l,
        state.q_m2,
        state.qd_m1,
        state.qd_l,
        state.qd_m2,
    ];
    let t = state.time;
    let k1 = eval(t, &y0)?;
    let k2 = eval(t + 0.5 * dt, &advance(&y0, &k1, 0.5 * dt))?;
    let k3 = eval(t + 0.5 * dt, &advance(&y0, &k2, 0.5 * dt))?;
    let k4 = eval(t + dt, &advance(&y0, &k3, dt))?;

    let mut y = [0.0; 6];
    for i in 0..6 {
        y[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let next = SimState {
        time: t + dt,
        q_m1: y[0],
        q_l: y[1],
        q_m2: y[2],
        qd_m1: y[3],
        qd_l: y[4],
        qd_m2: y[5],
    };
    if !next.is_finite() {
        return Err(DynamicsError::NonFiniteState);
    }
    Ok(next)
}

fn advance(y: &[f64; 6], k: &[f64; 6], h: f64) -> [f64; 6] {
    let mut out = [0.0; 6];
    for i in 0..6 {
        out[i] = y[i] + h * k[i];
    }
    out
}

/// Mechanical power delivered by the stiffness motor (W). Experiments charge
/// only the positive part as energy cost; regeneration is not credited.
pub fn mechanical_power_m2(state: &SimState, tau_m2: f64) -> f64 {
    tau_m2 * state.qd_m2
}

/// Kinetic plus spring potential energy of a state; the gearbox inertia is
/// lumped into the motor row.
pub fn mechanical_energy(params: &ActuatorParams, state: &SimState) -> Result<f64, DynamicsError> {
    let kinetic = 0.5
        * (params.effective_motor_inertia() * state.qd_m1 * state.qd_m1
            + params.j_l * state.qd_l * state.qd_l
            + params.j_m2 * state.qd_m2 * state.qd_m2);
    let q_rel = clamp_deflection(params, state.deflection(params));
    let potential = vsam::stored_energy(&params.vsam, params.model, state.q_m2, q_rel)?;
    Ok(kinetic + potential)
}
