//! Built-in scenario catalog.
//!
//! Motor-angle regulation under load in stiff and soft mode, link-angle
//! regulation and tracking, deflection (force) regulation and tracking,
//! equilibrium stiffness sweeps at two speeds, 10% stiffness modulation at
//! non-equilibrium positions, and fixed-stiffness baselines for the energy
//! accounting.

use super::{ControllerAssignment, Motor1Reference, Motor2Reference, Scenario};
use crate::control::{
    ControllerPreset, PRESET_FORCE_PID, PRESET_LINK_PID, PRESET_MOTOR_PID, PRESET_STIFFNESS_SERVO,
};
use crate::dynamics::{ActuatorParams, DisturbanceProfile, Schedule};

/// External loads are applied as ramped steps: onset 2 s, 0.5 s rise.
const LOAD_ONSET: f64 = 2.0;
const LOAD_RISE: f64 = 0.5;

struct Builder {
    params: ActuatorParams,
    physics_dt: f64,
    control_dt: f64,
}

impl Builder {
    fn assignment(&self, preset: &ControllerPreset, shaft_limit: f64) -> ControllerAssignment {
        ControllerAssignment {
            target: preset.target,
            gains: preset.gains(shaft_limit, self.control_dt),
            drive_scale: preset.drive_scale,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn scenario(
        &self,
        name: &str,
        description: &str,
        preset: &ControllerPreset,
        motor1_reference: Motor1Reference,
        motor2_reference: Motor2Reference,
        disturbances: DisturbanceProfile,
        duration: f64,
    ) -> Scenario {
        Scenario {
            name: name.into(),
            description: description.into(),
            params: self.params,
            motor1: self.assignment(preset, self.params.tau_m1_max),
            motor1_reference,
            motor2: self.assignment(&PRESET_STIFFNESS_SERVO, self.params.tau_m2_max),
            motor2_reference,
            disturbances,
            duration,
            physics_dt: self.physics_dt,
            control_dt: self.control_dt,
        }
    }
}

fn step_to(target: f64) -> Motor1Reference {
    // Rise gentle enough that the soft-mode link loop stays inside its
    // stable basin instead of bouncing off the deflection stops.
    Motor1Reference::SmoothStep {
        start: 0.1,
        from: 0.0,
        to: target,
        rise: 1.5,
    }
}

fn load(level: f64) -> DisturbanceProfile {
    DisturbanceProfile {
        link: Schedule::ramped_step(LOAD_ONSET, LOAD_RISE, level),
        ..Default::default()
    }
}

/// Roller station that scales the zero-deflection stiffness by `factor`
/// relative to the station `x` (cubic law inverse map).
fn roller_for_stiffness_scale(x: f64, factor: f64) -> f64 {
    x / factor.cbrt()
}

/// Deflection (force) control presses the link against a rigid environment;
/// model the blocked link as an effectively infinite inertia.
fn blocked_link(params: &ActuatorParams) -> ActuatorParams {
    ActuatorParams {
        j_l: 1e9,
        ..*params
    }
}

/// The built-in experiment catalog on a given parameter set and time grids.
pub fn scenario_catalog(
    params: &ActuatorParams,
    physics_dt: f64,
    control_dt: f64,
) -> Vec<Scenario> {
    let b = Builder {
        params: *params,
        physics_dt,
        control_dt,
    };
    let x_soft = params.vsam.x_max;
    let x_stiff = params.vsam.x_min;
    let half_pi = 0.5 * std::f64::consts::PI;
    let two_pi = 2.0 * std::f64::consts::PI;
    let setpoint = half_pi;

    // Motor-angle regulation under external load (gear-side PID).
    let mut catalog = vec![
        b.scenario(
            "fig9_stiff",
            "motor-angle regulation, stiff mode, 15 Nm load at t = 2 s",
            &PRESET_MOTOR_PID,
            step_to(setpoint),
            Motor2Reference::HoldRoller(x_stiff),
            load(15.0),
            6.0,
        ),
        b.scenario(
            "fig9_soft",
            "motor-angle regulation, soft mode, 5 Nm load at t = 2 s",
            &PRESET_MOTOR_PID,
            step_to(setpoint),
            Motor2Reference::HoldRoller(x_soft),
            load(5.0),
            6.0,
        ),
    ];

    // Link-angle regulation under external load.
    catalog.push(b.scenario(
        "fig10_stiff",
        "link-angle regulation, stiff mode, 10 Nm load at t = 2 s",
        &PRESET_LINK_PID,
        step_to(setpoint),
        Motor2Reference::HoldRoller(x_stiff),
        load(10.0),
        6.0,
    ));
    catalog.push(b.scenario(
        "fig10_soft",
        "link-angle regulation, soft mode, 1 Nm load at t = 2 s",
        &PRESET_LINK_PID,
        step_to(setpoint),
        Motor2Reference::HoldRoller(x_soft),
        load(1.0),
        6.0,
    ));

    // Link trajectory tracking grid: f in {0.1, 1} Hz, K in {pi/2, 2 pi}.
    for (mode, x_hold) in [("soft", x_soft), ("stiff", x_stiff)] {
        for (f_name, frequency, duration) in [("0p1hz", 0.1, 11.0), ("1hz", 1.0, 6.0)] {
            for (k_name, amplitude) in [("halfpi", half_pi), ("2pi", two_pi)] {
                catalog.push(b.scenario(
                    &format!("fig11_{mode}_{f_name}_{k_name}"),
                    &format!(
                        "link tracking, {mode} mode, {frequency} Hz raised-cosine, K = {k_name}"
                    ),
                    &PRESET_LINK_PID,
                    Motor1Reference::Track {
                        amplitude,
                        frequency,
                    },
                    Motor2Reference::HoldRoller(x_hold),
                    DisturbanceProfile::default(),
                    duration,
                ));
            }
        }
    }

    // Deflection (force) regulation and tracking through the spring law,
    // with the link blocked by the environment.
    let blocked = Builder {
        params: blocked_link(params),
        physics_dt,
        control_dt,
    };
    let deflection_soft = 15.0_f64.to_radians();
    let deflection_stiff = 1.0_f64.to_radians();
    for (mode, x_hold, deflection) in [
        ("soft", x_soft, deflection_soft),
        ("stiff", x_stiff, deflection_stiff),
    ] {
        catalog.push(blocked.scenario(
            &format!("fig12_reg_{mode}"),
            &format!("deflection regulation against a blocked link, {mode} mode"),
            &PRESET_FORCE_PID,
            Motor1Reference::SmoothStep {
                start: 0.5,
                from: 0.0,
                to: deflection,
                rise: 1.0,
            },
            Motor2Reference::HoldRoller(x_hold),
            DisturbanceProfile::default(),
            8.0,
        ));
        catalog.push(blocked.scenario(
            &format!("fig12_track_{mode}"),
            &format!("deflection tracking against a blocked link, {mode} mode, 0.2 Hz"),
            &PRESET_FORCE_PID,
            Motor1Reference::Track {
                amplitude: 0.5 * deflection,
                frequency: 0.2,
            },
            Motor2Reference::HoldRoller(x_hold),
            DisturbanceProfile::default(),
            8.0,
        ));
    }

    // Equilibrium stiffness sweeps across the full travel.
    catalog.push(b.scenario(
        "fig13_slow",
        "equilibrium full-range stiffness sweep at 0.1 Hz",
        &PRESET_MOTOR_PID,
        Motor1Reference::Hold(0.0),
        Motor2Reference::SineRoller {
            x_start: x_soft,
            x_end: x_stiff,
            frequency: 0.1,
            start: 0.5,
        },
        DisturbanceProfile::default(),
        10.5,
    ));
    catalog.push(b.scenario(
        "fig13_fast",
        "equilibrium full-range stiffness sweep at 1 Hz",
        &PRESET_MOTOR_PID,
        Motor1Reference::Hold(0.0),
        Motor2Reference::SineRoller {
            x_start: x_soft,
            x_end: x_stiff,
            frequency: 1.0,
            start: 0.5,
        },
        DisturbanceProfile::default(),
        2.5,
    ));

    // 10% stiffness modulation while the deflection loop holds a set angle.
    let modulation_soft = 12.0_f64.to_radians();
    let modulation_stiff = 0.75_f64.to_radians();
    for (mode, x_hold, deflection, factor) in [
        // Soft mode modulates 10% stiffer (the outer stop bounds the travel),
        // stiff mode 10% softer (the inner stop bounds it).
        ("soft", x_soft, modulation_soft, 1.1),
        ("stiff", x_stiff, modulation_stiff, 0.9),
    ] {
        catalog.push(blocked.scenario(
            &format!("fig14_{mode}"),
            &format!("10% stiffness modulation at held deflection, {mode} mode"),
            &PRESET_FORCE_PID,
            Motor1Reference::SmoothStep {
                start: 0.1,
                from: 0.0,
                to: deflection,
                rise: 0.5,
            },
            Motor2Reference::SmoothSquareRoller {
                x_a: x_hold,
                x_b: roller_for_stiffness_scale(x_hold, factor),
                period: 4.0,
                rise: 0.5,
                start: 2.0,
            },
            DisturbanceProfile::default(),
            10.0,
        ));
    }

    // Fixed-stiffness baselines for the energy comparison.
    for (mode, x_hold, deflection) in [
        ("soft", x_soft, modulation_soft),
        ("stiff", x_stiff, modulation_stiff),
    ] {
        catalog.push(blocked.scenario(
            &format!("fig15_fixed_{mode}"),
            &format!("fixed stiffness at held deflection (energy baseline), {mode} mode"),
            &PRESET_FORCE_PID,
            Motor1Reference::SmoothStep {
                start: 0.1,
                from: 0.0,
                to: deflection,
                rise: 0.5,
            },
            Motor2Reference::HoldRoller(x_hold),
            DisturbanceProfile::default(),
            6.0,
        ));
    }

    catalog
}
