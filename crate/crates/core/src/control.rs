//! Discrete-time PID control.
//!
//! One PID law serves all four loops of the actuator (position-motor angle,
//! link angle, link deflection, stiffness-motor angle); they differ only in
//! which state they measure and in their gain presets. The derivative term
//! acts on the supplied rate signals rather than differenced error, the
//! integrator advances by the trapezoidal rule, and a conditional anti-windup
//! freezes it while the output saturates in the direction the error pushes.

use thiserror::Error;

/// PID gains plus output saturation for one loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Symmetric output clamp, in the controller's output units.
    pub output_limit: f64,
    /// Controller period (s).
    pub sample_time: f64,
}

impl PidGains {
    pub fn validate(&self) -> Result<(), ControlError> {
        if !(self.sample_time > 0.0) {
            return Err(ControlError::InvalidGains("sample_time must be positive"));
        }
        if !(self.output_limit > 0.0) {
            return Err(ControlError::InvalidGains("output_limit must be positive"));
        }
        if self.kp < 0.0 || self.ki < 0.0 || self.kd < 0.0 {
            return Err(ControlError::InvalidGains("gains must be non-negative"));
        }
        Ok(())
    }
}

/// Integrator and previous-error memory of one loop; reset at scenario start.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integral: f64,
    pub previous_error: f64,
}

/// Which plant variable a loop controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlTarget {
    /// Gear-side angle of the position motor, q_g = q_m1 / N.
    MotorPosition,
    /// Output-link angle q_l.
    LinkPosition,
    /// Link deflection q_l - q_g (force control through the spring law).
    Deflection,
    /// Stiffness-motor angle q_m2.
    StiffnessMotorPosition,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid PID gains: {0}")]
    InvalidGains(&'static str),
}

/// One controller update.
///
/// `u = kp e + ki I + kd (ref_rate - meas_rate)` with `e = reference - measured`,
/// the integral advanced by the trapezoidal rule and clamped output. While the
/// unsaturated output exceeds the limit and the error keeps pushing the same
/// way, the integrator holds its previous value.
pub fn pid_update(
    gains: &PidGains,
    state: PidState,
    reference: f64,
    reference_rate: f64,
    measured: f64,
    measured_rate: f64,
) -> (f64, PidState) {
    let error = reference - measured;
    let error_rate = reference_rate - measured_rate;
    let advanced = state.integral + 0.5 * gains.sample_time * (error + state.previous_error);

    let raw = gains.kp * error + gains.ki * advanced + gains.kd * error_rate;
    let saturated = raw.abs() > gains.output_limit;
    let windup = saturated && error.signum() == raw.signum();
    let integral = if windup { state.integral } else { advanced };
    let output = (gains.kp * error + gains.ki * integral + gains.kd * error_rate)
        .clamp(-gains.output_limit, gains.output_limit);
    (
        output,
        PidState {
            integral,
            previous_error: error,
        },
    )
}

/// Raised-cosine tracking reference: zero (at rest) until t = 1 s, then
/// `K (1 - cos(2 pi f (t - 1)))` with its analytic rate.
pub fn reference_trajectory(amplitude: f64, frequency: f64, t: f64) -> (f64, f64) {
    if t < 1.0 {
        return (0.0, 0.0);
    }
    let omega = std::f64::consts::TAU * frequency;
    let phase = omega * (t - 1.0);
    (
        amplitude * (1.0 - phase.cos()),
        amplitude * omega * phase.sin(),
    )
}

/// A named controller preset: the gain set plus the loop target and the
/// drive scale converting controller output to shaft torque (Nm per unit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerPreset {
    pub name: &'static str,
    pub target: ControlTarget,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub drive_scale: f64,
}

impl ControllerPreset {
    /// Gains for a loop bounded by `shaft_torque_limit` at the motor and
    /// sampled every `sample_time`. The output clamp is expressed in
    /// controller units so the torque command spans exactly the shaft limit.
    pub fn gains(&self, shaft_torque_limit: f64, sample_time: f64) -> PidGains {
        PidGains {
            kp: self.kp,
            ki: self.ki,
            kd: self.kd,
            output_limit: shaft_torque_limit / self.drive_scale.abs(),
            sample_time,
        }
    }
}

/// Drive scale of the position/link/deflection loops: the preset gains map
/// error to a current-like command, taken as 1e-3 Nm of shaft torque per unit.
const MOTOR1_DRIVE_SCALE: f64 = 1e-3;

/// Regulation of the position-motor (gear-side) angle.
pub const PRESET_MOTOR_PID: ControllerPreset = ControllerPreset {
    name: "fig9_motor_pid",
    target: ControlTarget::MotorPosition,
    kp: 15000.0,
    ki: 75.0,
    kd: 500.0,
    drive_scale: MOTOR1_DRIVE_SCALE,
};

/// Regulation and tracking of the link angle.
pub const PRESET_LINK_PID: ControllerPreset = ControllerPreset {
    name: "fig10_link_pid",
    target: ControlTarget::LinkPosition,
    kp: 5000.0,
    ki: 35.0,
    kd: 95.0,
    drive_scale: MOTOR1_DRIVE_SCALE,
};

/// Deflection (force) control through the spring law. The drive scale is
/// negative: winding up a positive deflection q_l - q_g requires the motor to
/// back away from the link, so the loop inverts the actuation direction.
pub const PRESET_FORCE_PID: ControllerPreset = ControllerPreset {
    name: "fig12_force_pid",
    target: ControlTarget::Deflection,
    kp: 2500.0,
    ki: 15.0,
    kd: 85.0,
    drive_scale: -MOTOR1_DRIVE_SCALE,
};

/// Position servo for the stiffness motor (gains in torque units).
pub const PRESET_STIFFNESS_SERVO: ControllerPreset = ControllerPreset {
    name: "stiffness_servo",
    target: ControlTarget::StiffnessMotorPosition,
    kp: 5.0,
    ki: 0.1,
    kd: 0.05,
    drive_scale: 1.0,
};

/// Look up a preset by its configuration name.
pub fn preset(name: &str) -> Option<&'static ControllerPreset> {
    match name {
        "fig9_motor_pid" => Some(&PRESET_MOTOR_PID),
        "fig10_link_pid" => Some(&PRESET_LINK_PID),
        "fig12_force_pid" => Some(&PRESET_FORCE_PID),
        "stiffness_servo" => Some(&PRESET_STIFFNESS_SERVO),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain_gains(kp: f64, ki: f64, kd: f64) -> PidGains {
        PidGains {
            kp,
            ki,
            kd,
            output_limit: 1e9,
            sample_time: 1e-3,
        }
    }

    #[test]
    fn zero_error_zero_output() {
        let gains = plain_gains(100.0, 10.0, 1.0);
        let (u, state) = pid_update(&gains, PidState::default(), 0.0, 0.0, 0.0, 0.0);
        assert_eq!(u, 0.0);
        assert_eq!(state.integral, 0.0);
    }

    #[test]
    fn proportional_law() {
        let gains = plain_gains(5000.0, 0.0, 0.0);
        let (u, _) = pid_update(&gains, PidState::default(), 0.01, 0.0, 0.0, 0.0);
        assert_relative_eq!(u, 50.0, max_relative = 1e-12);
    }

    #[test]
    fn integral_of_constant_error() {
        // ki * I after 1 s of constant e = 1e-3 at 1 kHz is 0.035 less half a
        // trapezoid start-up sample.
        let gains = plain_gains(0.0, 35.0, 0.0);
        let mut state = PidState::default();
        let mut u = 0.0;
        for _ in 0..1000 {
            (u, state) = pid_update(&gains, state, 1e-3, 0.0, 0.0, 0.0);
        }
        assert!((u - 0.035).abs() <= 35.0 * 1e-3 * 1e-3);
    }

    #[test]
    fn output_respects_limit() {
        let gains = PidGains {
            kp: 1000.0,
            ki: 0.0,
            kd: 0.0,
            output_limit: 2.0,
            sample_time: 1e-3,
        };
        for e in [-10.0, -0.001, 0.0, 0.5, 100.0] {
            let (u, _) = pid_update(&gains, PidState::default(), e, 0.0, 0.0, 0.0);
            assert!(u.abs() <= 2.0);
        }
    }

    #[test]
    fn antiwindup_bounds_integrator() {
        let gains = PidGains {
            kp: 10.0,
            ki: 4.0,
            kd: 0.0,
            output_limit: 1.0,
            sample_time: 1e-3,
        };
        let mut state = PidState::default();
        for _ in 0..100_000 {
            let (_, next) = pid_update(&gains, state, 5.0, 0.0, 0.0, 0.0);
            state = next;
        }
        let bound = gains.output_limit / gains.ki;
        assert!(
            state.integral.abs() <= bound + gains.sample_time * 5.0,
            "integral {} vs bound {}",
            state.integral,
            bound
        );
    }

    #[test]
    fn integrator_resumes_when_error_reverses() {
        // Integrator-dominant loop: the output saturates through ki * I, so
        // an opposing error must unfreeze the accumulator.
        let gains = PidGains {
            kp: 0.0,
            ki: 4.0,
            kd: 0.0,
            output_limit: 1.0,
            sample_time: 1e-3,
        };
        let mut state = PidState::default();
        for _ in 0..1000 {
            (_, state) = pid_update(&gains, state, 5.0, 0.0, 0.0, 0.0);
        }
        let frozen = state.integral;
        assert!(frozen <= gains.output_limit / gains.ki + 5.0 * gains.sample_time);
        // Error flips sign: the integrator must move again. Two updates, as
        // the first trapezoid increment straddling the flip averages to zero.
        (_, state) = pid_update(&gains, state, -5.0, 0.0, 0.0, 0.0);
        (_, state) = pid_update(&gains, state, -5.0, 0.0, 0.0, 0.0);
        assert!(state.integral < frozen);
    }

    #[test]
    fn linear_below_saturation() {
        let gains = plain_gains(100.0, 10.0, 5.0);
        let base = PidState {
            integral: 0.02,
            previous_error: 0.01,
        };
        let scaled = PidState {
            integral: 0.04,
            previous_error: 0.02,
        };
        let (u1, _) = pid_update(&gains, base, 0.01, 0.1, 0.0, 0.0);
        let (u2, _) = pid_update(&gains, scaled, 0.02, 0.2, 0.0, 0.0);
        assert_relative_eq!(u2, 2.0 * u1, max_relative = 1e-12);
    }

    #[test]
    fn trajectory_starts_at_rest() {
        assert_eq!(reference_trajectory(1.0, 0.5, 0.0), (0.0, 0.0));
        assert_eq!(reference_trajectory(1.0, 0.5, 1.0), (0.0, 0.0));
    }

    #[test]
    fn trajectory_peak_value() {
        let amplitude = 0.5 * std::f64::consts::PI;
        let frequency = 0.25;
        let (q, qd) = reference_trajectory(amplitude, frequency, 1.0 + 0.5 / frequency);
        assert_relative_eq!(q, 2.0 * amplitude, max_relative = 1e-9);
        assert!(qd.abs() < 1e-9);
    }

    #[test]
    fn trajectory_hand_value() {
        // K = pi/2, f = 0.1 Hz, t = 3.5 s: phase is pi/2, so the position is
        // K (1 - cos(pi/2)) = K ~ 1.5708 and the rate 2 pi f K ~ 0.9870.
        let amplitude = 0.5 * std::f64::consts::PI;
        let (q, qd) = reference_trajectory(amplitude, 0.1, 3.5);
        assert_relative_eq!(q, amplitude, max_relative = 1e-9);
        assert_relative_eq!(qd, 0.9869604, max_relative = 1e-6);
    }

    #[test]
    fn presets_carry_pinned_gains() {
        let motor = preset("fig9_motor_pid").unwrap();
        assert_eq!((motor.kp, motor.ki, motor.kd), (15000.0, 75.0, 500.0));
        assert_eq!(motor.target, ControlTarget::MotorPosition);

        let link = preset("fig10_link_pid").unwrap();
        assert_eq!((link.kp, link.ki, link.kd), (5000.0, 35.0, 95.0));
        assert_eq!(link.target, ControlTarget::LinkPosition);

        let force = preset("fig12_force_pid").unwrap();
        assert_eq!((force.kp, force.ki, force.kd), (2500.0, 15.0, 85.0));
        assert_eq!(force.target, ControlTarget::Deflection);

        assert!(preset("stiffness_servo").is_some());
        assert!(preset("nonexistent").is_none());
    }

    #[test]
    fn preset_gains_cover_shaft_limit() {
        let gains = PRESET_MOTOR_PID.gains(1.1, 1e-3);
        assert_relative_eq!(
            gains.output_limit * PRESET_MOTOR_PID.drive_scale,
            1.1,
            max_relative = 1e-12
        );
        gains.validate().unwrap();
        // The inverted force loop still clamps at the shaft limit.
        let force_gains = PRESET_FORCE_PID.gains(1.1, 1e-3);
        assert_relative_eq!(
            force_gains.output_limit * PRESET_FORCE_PID.drive_scale.abs(),
            1.1,
            max_relative = 1e-12
        );
        force_gains.validate().unwrap();
    }
}
