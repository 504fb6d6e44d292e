//! Variable-stiffness mechanism statics.
//!
//! `spring_count` leaf springs sit radially around the output axis; a ball
//! screw driven by the stiffness motor places rollers an arc length `x_r`
//! from each clamp, so the screw angle sets the active bending span. Link
//! rotation relative to the equilibrium set by the position motor deflects
//! every spring identically (radial symmetry), producing a restoring joint
//! torque whose gradient is the joint stiffness.
//!
//! Two spring models are provided. The large-deflection model resolves each
//! spring with the exact planar elastica of [`crate::beam`]; the
//! small-deflection model uses the closed forms
//!
//! ```text
//! tau_s = 6 n EI r^2 sin(q/2) / x_r^3        k = 3 n EI r^2 cos(q/2) / x_r^3
//! ```
//!
//! (n springs of rigidity EI at moment arm r). The deflected springs also
//! push axially on the rollers, which loads the stiffness motor with the
//! disturbance torque `tau_dis = tau_s tan(phi)`, `phi` being the beam slope
//! at the contact.

use crate::beam::{self, BeamError, BeamSpec, SolverSettings};
use std::f64::consts::TAU;
use thiserror::Error;

/// Default spring material: spring steel.
pub const DEFAULT_YOUNGS_MODULUS: f64 = 200e9;
/// Default leaf-spring free length (m).
pub const DEFAULT_FULL_LENGTH: f64 = 0.1;
/// Default moment arm from joint axis to roller line (m).
pub const DEFAULT_MOMENT_ARM: f64 = 0.010;
/// Default ball-screw lead (m per revolution).
pub const DEFAULT_SCREW_LEAD: f64 = 0.01;
/// Default spring count.
pub const DEFAULT_SPRING_COUNT: u32 = 8;
/// Default link deflection range: +/- 25 degrees.
pub const DEFAULT_DEFLECTION_LIMIT: f64 = 25.0 * std::f64::consts::PI / 180.0;

/// Rollers cannot approach the clamp closer than this (m).
const MIN_ROLLER_STOP: f64 = 5e-3;

/// Which spring model resolves joint torque and stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiffnessModel {
    /// Exact planar elastica per spring.
    LargeDeflection,
    /// Linear cantilever closed forms.
    SmallDeflection,
}

/// Full mechanism geometry and solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VsamConfig {
    pub beam: BeamSpec,
    pub spring_count: u32,
    /// Moment arm r from the joint axis to the roller contact line (m).
    pub moment_arm: f64,
    /// Ball-screw lead (m per revolution).
    pub screw_lead: f64,
    /// Roller travel limits along the spring (m).
    pub x_min: f64,
    pub x_max: f64,
    /// Admissible link deflection about equilibrium (rad).
    pub deflection_limit: f64,
    pub solver: SolverSettings,
}

impl VsamConfig {
    /// Screw transmission ratio eta = lead / 2 pi (m per rad).
    pub fn eta(&self) -> f64 {
        self.screw_lead / TAU
    }

    pub fn validate(&self) -> Result<(), VsamError> {
        self.beam.validate()?;
        self.solver.validate()?;
        if self.spring_count == 0 {
            return Err(VsamError::InvalidConfig("spring_count must be >= 1"));
        }
        if !(self.moment_arm > 0.0) || !self.moment_arm.is_finite() {
            return Err(VsamError::InvalidConfig("moment_arm must be positive"));
        }
        if !(self.screw_lead > 0.0) || !self.screw_lead.is_finite() {
            return Err(VsamError::InvalidConfig("screw_lead must be positive"));
        }
        if !(self.x_min > 0.0) || !(self.x_min < self.x_max) {
            return Err(VsamError::InvalidConfig("need 0 < x_min < x_max"));
        }
        if self.x_max > self.beam.full_length {
            return Err(VsamError::InvalidConfig(
                "x_max must not exceed full_length",
            ));
        }
        if !(self.deflection_limit > 0.0) {
            return Err(VsamError::InvalidConfig(
                "deflection_limit must be positive",
            ));
        }
        Ok(())
    }

    /// Default geometry calibrated to the 21 / 985 Nm/rad stiffness endpoints.
    pub fn default_calibrated() -> Self {
        let template = BeamSpec {
            youngs_modulus: DEFAULT_YOUNGS_MODULUS,
            area_moment: 1.0, // replaced by calibration
            full_length: DEFAULT_FULL_LENGTH,
        };
        calibrate(
            template,
            DEFAULT_SPRING_COUNT,
            DEFAULT_MOMENT_ARM,
            DEFAULT_SCREW_LEAD,
            DEFAULT_DEFLECTION_LIMIT,
            CalibrationTargets::default(),
            SolverSettings::default(),
        )
        .expect("default geometry is feasible")
    }
}

/// Target stiffness endpoints for [`calibrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTargets {
    /// Joint stiffness with the rollers at x_max (Nm/rad).
    pub k_soft: f64,
    /// Joint stiffness with the rollers at x_min (Nm/rad).
    pub k_stiff: f64,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            k_soft: 21.0,
            k_stiff: 985.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VsamError {
    #[error("link deflection {deflection:.5} rad exceeds the +/-{limit:.5} rad range")]
    DeflectionLimitExceeded { deflection: f64, limit: f64 },
    #[error("calibrated roller stop x_min = {x_min:.4} m is below the 5 mm clamp clearance")]
    InfeasibleGeometry { x_min: f64 },
    #[error("invalid mechanism configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Beam(#[from] BeamError),
}

/// Roller position with the travel-limit clamp flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollerPosition {
    /// Arc length from clamp to roller after clamping (m).
    pub position: f64,
    /// Whether the commanded position hit a travel stop.
    pub clamped: bool,
}

/// Roller position from the stiffness-motor angle: `x_r = eta q_m2`, clamped
/// to the travel stops. Clamping at x_min also removes the q_m2 -> 0
/// singularity of the closed-form stiffness laws.
pub fn roller_position(config: &VsamConfig, q_m2: f64) -> RollerPosition {
    let raw = config.eta() * q_m2;
    let position = raw.clamp(config.x_min, config.x_max);
    RollerPosition {
        position,
        clamped: position != raw,
    }
}

/// Transverse spring deflection at the roller for a link angle `q_l_rel`
/// relative to equilibrium: `2 r sin(q/2) cos(q)`. Odd in `q_l_rel`.
pub fn spring_deflection(config: &VsamConfig, q_l_rel: f64) -> Result<f64, VsamError> {
    check_deflection(config, q_l_rel)?;
    Ok(spring_deflection_unchecked(config, q_l_rel))
}

pub(crate) fn spring_deflection_unchecked(config: &VsamConfig, q_l_rel: f64) -> f64 {
    2.0 * config.moment_arm * (0.5 * q_l_rel).sin() * q_l_rel.cos()
}

fn check_deflection(config: &VsamConfig, q_l_rel: f64) -> Result<(), VsamError> {
    if !q_l_rel.is_finite() || q_l_rel.abs() > config.deflection_limit * (1.0 + 1e-12) {
        return Err(VsamError::DeflectionLimitExceeded {
            deflection: q_l_rel,
            limit: config.deflection_limit,
        });
    }
    Ok(())
}

/// Per-spring elastica state at deflection magnitude `dy`.
fn ldm_spring(config: &VsamConfig, x_r: f64, dy: f64) -> Result<(f64, f64), VsamError> {
    let solution = beam::solve_for_deflection(&config.beam, x_r, dy, &config.solver)?;
    Ok((solution.applied_force, solution.tip_slope))
}

/// Joint torque exerted by the spring stage for a link deflection `q_l_rel`.
/// Odd in `q_l_rel` with `sign(tau) = sign(q_l_rel)`; zero at equilibrium.
pub fn spring_torque(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    check_deflection(config, q_l_rel)?;
    spring_torque_unchecked(config, model, q_m2, q_l_rel)
}

pub(crate) fn spring_torque_unchecked(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    let x_r = roller_position(config, q_m2).position;
    let n = config.spring_count as f64;
    let r = config.moment_arm;
    match model {
        StiffnessModel::SmallDeflection => {
            let rigidity = config.beam.flexural_rigidity();
            Ok(6.0 * n * rigidity * r * r * (0.5 * q_l_rel).sin() / x_r.powi(3))
        }
        StiffnessModel::LargeDeflection => {
            let dy = spring_deflection_unchecked(config, q_l_rel);
            if dy == 0.0 {
                return Ok(0.0);
            }
            let (force, _) = ldm_spring(config, x_r, dy.abs())?;
            Ok(n * force * r * dy.signum())
        }
    }
}

/// Step used for the large-deflection finite-difference stiffness (rad).
const STIFFNESS_FD_STEP: f64 = 1e-5;

/// Tangent joint stiffness `d tau_s / d q_l_rel` (Nm/rad). Closed form under
/// the small-deflection model; central finite difference of the torque under
/// the large-deflection model. Even in `q_l_rel` and positive over the range.
pub fn stiffness(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    check_deflection(config, q_l_rel)?;
    let x_r = roller_position(config, q_m2).position;
    match model {
        StiffnessModel::SmallDeflection => {
            let n = config.spring_count as f64;
            let r = config.moment_arm;
            let rigidity = config.beam.flexural_rigidity();
            Ok(3.0 * n * rigidity * r * r * (0.5 * q_l_rel).cos() / x_r.powi(3))
        }
        StiffnessModel::LargeDeflection => {
            let h = STIFFNESS_FD_STEP;
            let above = spring_torque_unchecked(config, model, q_m2, q_l_rel + h)?;
            let below = spring_torque_unchecked(config, model, q_m2, q_l_rel - h)?;
            Ok((above - below) / (2.0 * h))
        }
    }
}

/// Disturbance torque the deflected springs exert on the stiffness motor
/// through the ball screw: `tau_dis = tau_s tan(phi)` with `phi` the beam
/// slope at the roller (slope of the force magnitude, so the result is odd in
/// `q_l_rel` and carries the sign of `tau_s`). Exactly zero at equilibrium.
pub fn disturbance_torque(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    check_deflection(config, q_l_rel)?;
    disturbance_torque_unchecked(config, model, q_m2, q_l_rel)
}

pub(crate) fn disturbance_torque_unchecked(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    if q_l_rel == 0.0 {
        return Ok(0.0);
    }
    let x_r = roller_position(config, q_m2).position;
    match model {
        StiffnessModel::SmallDeflection => {
            let torque = spring_torque_unchecked(config, model, q_m2, q_l_rel)?;
            // Linear-theory contact slope phi = F x_r^2 / 2EI for the
            // per-spring force magnitude F = 6 EI r sin(|q|/2) / x_r^3.
            let slope = 3.0 * config.moment_arm * (0.5 * q_l_rel.abs()).sin() / x_r;
            Ok(torque * slope.tan())
        }
        StiffnessModel::LargeDeflection => {
            let dy = spring_deflection_unchecked(config, q_l_rel);
            let (force, slope) = ldm_spring(config, x_r, dy.abs())?;
            let n = config.spring_count as f64;
            let axial = force * slope.tan();
            Ok(n * axial * config.moment_arm * dy.signum())
        }
    }
}

/// Panel count of the large-deflection stored-energy quadrature.
const ENERGY_PANELS: usize = 64;

/// Elastic energy stored in the spring stage at deflection `q_l_rel` (J).
/// Closed form `12 n EI r^2 (1 - cos(q/2)) / x_r^3` under the
/// small-deflection model; composite-Simpson integral of the torque under the
/// large-deflection model. Even in `q_l_rel`, zero at equilibrium.
pub fn stored_energy(
    config: &VsamConfig,
    model: StiffnessModel,
    q_m2: f64,
    q_l_rel: f64,
) -> Result<f64, VsamError> {
    check_deflection(config, q_l_rel)?;
    let x_r = roller_position(config, q_m2).position;
    match model {
        StiffnessModel::SmallDeflection => {
            let n = config.spring_count as f64;
            let r = config.moment_arm;
            let rigidity = config.beam.flexural_rigidity();
            Ok(12.0 * n * rigidity * r * r * (1.0 - (0.5 * q_l_rel).cos()) / x_r.powi(3))
        }
        StiffnessModel::LargeDeflection => {
            if q_l_rel == 0.0 {
                return Ok(0.0);
            }
            // Simpson over [0, q]; the signed step keeps the integral of the
            // odd torque non-negative for either deflection sign.
            let h = q_l_rel / ENERGY_PANELS as f64;
            let mut total = 0.0;
            let mut left = 0.0;
            for i in 0..ENERGY_PANELS {
                let a = i as f64 * h;
                let mid = a + 0.5 * h;
                let right_q = a + h;
                let right = spring_torque_unchecked(config, model, q_m2, right_q)?;
                let middle = spring_torque_unchecked(config, model, q_m2, mid)?;
                total += h / 6.0 * (left + 4.0 * middle + right);
                left = right;
            }
            Ok(total.max(0.0))
        }
    }
}

/// Solve the mechanism geometry against target stiffness endpoints.
///
/// The roller travel tops out at the spring tip (`x_max = full_length`); the
/// cross section is sized so the small-deflection stiffness at `x_max` equals
/// `k_soft`, and the inner stop follows from the cubic stiffness law,
/// `x_min = x_max (k_soft / k_stiff)^(1/3)`.
pub fn calibrate(
    beam_template: BeamSpec,
    spring_count: u32,
    moment_arm: f64,
    screw_lead: f64,
    deflection_limit: f64,
    targets: CalibrationTargets,
    solver: SolverSettings,
) -> Result<VsamConfig, VsamError> {
    if !(targets.k_soft > 0.0) || !(targets.k_stiff > targets.k_soft) {
        return Err(VsamError::InvalidConfig(
            "calibration targets need 0 < k_soft < k_stiff",
        ));
    }
    if spring_count == 0 || !(moment_arm > 0.0) {
        return Err(VsamError::InvalidConfig(
            "calibration needs spring_count >= 1 and moment_arm > 0",
        ));
    }
    let x_max = beam_template.full_length;
    let n = spring_count as f64;
    let area_moment = targets.k_soft * x_max.powi(3)
        / (3.0 * n * beam_template.youngs_modulus * moment_arm * moment_arm);
    let x_min = x_max * (targets.k_soft / targets.k_stiff).cbrt();
    if x_min < MIN_ROLLER_STOP {
        return Err(VsamError::InfeasibleGeometry { x_min });
    }
    let config = VsamConfig {
        beam: BeamSpec {
            area_moment,
            ..beam_template
        },
        spring_count,
        moment_arm,
        screw_lead,
        x_min,
        x_max,
        deflection_limit,
        solver,
    };
    config.validate()?;
    Ok(config)
}
