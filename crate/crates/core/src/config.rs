//! Run configuration: flat dotted-key files layered over built-in defaults.
//!
//! The format is one `section.key = value` assignment per line with `#`
//! comments. Layers merge left to right (defaults, then file, then command
//! line), later layers winning per key; the merged map is then applied to the
//! typed configuration and validated as a whole. Unknown keys are rejected so
//! typos fail loudly.
//!
//! By default the mechanism geometry is calibrated: the spring cross section
//! and the roller stops are derived from the `vsam.k_soft` / `vsam.k_stiff`
//! stiffness targets. Setting `vsam.calibrate = false` instead takes
//! `beam.area_moment`, `vsam.x_min`, and `vsam.x_max` literally.

use crate::beam::{BeamSpec, SolverSettings};
use crate::dynamics::ActuatorParams;
use crate::vsam::{self, CalibrationTargets, StiffnessModel};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Every key the format accepts.
const KNOWN_KEYS: &[&str] = &[
    "beam.youngs_modulus",
    "beam.area_moment",
    "beam.full_length",
    "vsam.calibrate",
    "vsam.k_soft",
    "vsam.k_stiff",
    "vsam.spring_count",
    "vsam.moment_arm",
    "vsam.screw_lead",
    "vsam.x_min",
    "vsam.x_max",
    "vsam.deflection_limit",
    "solver.residual_tol",
    "solver.max_iterations",
    "solver.quadrature_points",
    "actuator.j_m1",
    "actuator.j_g",
    "actuator.j_m2",
    "actuator.j_l",
    "actuator.b_m1",
    "actuator.b_g",
    "actuator.b_m2",
    "actuator.b_l",
    "actuator.gear_ratio",
    "actuator.tau_m1_max",
    "actuator.tau_m2_max",
    "actuator.model",
    "sim.physics_dt",
    "sim.control_dt",
    "run.out_dir",
    "run.scenario",
];

/// One unmerged layer of raw key/value assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigLayer {
    entries: BTreeMap<String, String>,
}

impl ConfigLayer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Merge `other` over `self` (later layer wins per key). Associative.
    pub fn merged(&self, other: &ConfigLayer) -> ConfigLayer {
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            entries.insert(k.clone(), v.clone());
        }
        ConfigLayer { entries }
    }

    /// Parse one layer from file text. Duplicate keys: last assignment wins.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut layer = ConfigLayer::new();
        for (index, raw_line) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or(ConfigError::Parse {
                line: line_no,
                column: line.len().max(1),
                message: "expected 'key = value'",
            })?;
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            if key.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: 1,
                    message: "missing key before '='",
                });
            }
            if let Some(offset) = key.bytes().position(|b| {
                !(b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'.' || b == b'_')
            }) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: offset + 1,
                    message: "key may contain only [a-z0-9_.]",
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    column: eq + 2,
                    message: "missing value after '='",
                });
            }
            layer.set(key, value);
        }
        Ok(layer)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub actuator: ActuatorParams,
    pub physics_dt: f64,
    pub control_dt: f64,
    pub out_dir: Option<String>,
    pub scenario: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            actuator: ActuatorParams::default_calibrated(),
            physics_dt: 1e-4,
            control_dt: 1e-3,
            out_dir: None,
            scenario: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: &'static str,
    },
    #[error("unknown configuration key '{0}'")]
    UnknownKey(String),
    #[error("[{module}] {invariant}")]
    Validation {
        module: &'static str,
        invariant: String,
    },
    #[error("cannot read configuration: {0}")]
    Io(String),
}

fn validation(module: &'static str, invariant: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        module,
        invariant: invariant.into(),
    }
}

fn parse_f64(module: &'static str, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .map_err(|_| validation(module, format!("{key} expects a number, got '{value}'")))
}

fn parse_u32(module: &'static str, key: &str, value: &str) -> Result<u32, ConfigError> {
    value.parse::<u32>().map_err(|_| {
        validation(
            module,
            format!("{key} expects a non-negative integer, got '{value}'"),
        )
    })
}

fn parse_bool(module: &'static str, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(validation(
            module,
            format!("{key} expects true or false, got '{value}'"),
        )),
    }
}

/// Apply a merged layer to the defaults and validate everything.
pub fn resolve(layer: &ConfigLayer) -> Result<RunConfig, ConfigError> {
    for key in layer.keys() {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
    }

    let get = |key: &str| layer.get(key);
    let f = |module: &'static str, key: &str, default: f64| -> Result<f64, ConfigError> {
        match get(key) {
            Some(value) => parse_f64(module, key, value),
            None => Ok(default),
        }
    };

    // Geometry and calibration inputs.
    let youngs_modulus = f("beam", "beam.youngs_modulus", vsam::DEFAULT_YOUNGS_MODULUS)?;
    let full_length = f("beam", "beam.full_length", vsam::DEFAULT_FULL_LENGTH)?;
    let spring_count = match get("vsam.spring_count") {
        Some(v) => parse_u32("vsam", "vsam.spring_count", v)?,
        None => vsam::DEFAULT_SPRING_COUNT,
    };
    let moment_arm = f("vsam", "vsam.moment_arm", vsam::DEFAULT_MOMENT_ARM)?;
    let screw_lead = f("vsam", "vsam.screw_lead", vsam::DEFAULT_SCREW_LEAD)?;
    let deflection_limit = f(
        "vsam",
        "vsam.deflection_limit",
        vsam::DEFAULT_DEFLECTION_LIMIT,
    )?;
    let calibrate = match get("vsam.calibrate") {
        Some(v) => parse_bool("vsam", "vsam.calibrate", v)?,
        None => true,
    };

    let solver = SolverSettings {
        residual_tol: f("solver", "solver.residual_tol", 1e-10)?,
        max_iterations: match get("solver.max_iterations") {
            Some(v) => parse_u32("solver", "solver.max_iterations", v)?,
            None => 200,
        },
        quadrature_points: match get("solver.quadrature_points") {
            Some(v) => parse_u32("solver", "solver.quadrature_points", v)? as usize,
            None => 64,
        },
    };
    solver
        .validate()
        .map_err(|e| validation("solver", e.to_string()))?;

    let vsam_config = if calibrate {
        for forbidden in ["beam.area_moment", "vsam.x_min", "vsam.x_max"] {
            if get(forbidden).is_some() {
                return Err(validation(
                    "vsam",
                    format!("{forbidden} conflicts with vsam.calibrate = true (set it to false to size the geometry by hand)"),
                ));
            }
        }
        let targets = CalibrationTargets {
            k_soft: f("vsam", "vsam.k_soft", 21.0)?,
            k_stiff: f("vsam", "vsam.k_stiff", 985.0)?,
        };
        let template = BeamSpec {
            youngs_modulus,
            area_moment: 1.0,
            full_length,
        };
        vsam::calibrate(
            template,
            spring_count,
            moment_arm,
            screw_lead,
            deflection_limit,
            targets,
            solver,
        )
        .map_err(|e| validation("vsam", e.to_string()))?
    } else {
        let defaults = crate::vsam::VsamConfig::default_calibrated();
        let config = crate::vsam::VsamConfig {
            beam: BeamSpec {
                youngs_modulus,
                area_moment: f("beam", "beam.area_moment", defaults.beam.area_moment)?,
                full_length,
            },
            spring_count,
            moment_arm,
            screw_lead,
            x_min: f("vsam", "vsam.x_min", defaults.x_min)?,
            x_max: f("vsam", "vsam.x_max", defaults.x_max)?,
            deflection_limit,
            solver,
        };
        config
            .validate()
            .map_err(|e| validation("vsam", e.to_string()))?;
        config
    };

    let model = match get("actuator.model") {
        None | Some("small_deflection") => StiffnessModel::SmallDeflection,
        Some("large_deflection") => StiffnessModel::LargeDeflection,
        Some(other) => {
            let message = format!(
                "actuator.model must be small_deflection or large_deflection, got '{other}'"
            );
            return Err(validation("actuator", message));
        }
    };

    let base = ActuatorParams::default_calibrated();
    let actuator = ActuatorParams {
        j_m1: f("actuator", "actuator.j_m1", base.j_m1)?,
        j_g: f("actuator", "actuator.j_g", base.j_g)?,
        j_m2: f("actuator", "actuator.j_m2", base.j_m2)?,
        j_l: f("actuator", "actuator.j_l", base.j_l)?,
        b_m1: f("actuator", "actuator.b_m1", base.b_m1)?,
        b_g: f("actuator", "actuator.b_g", base.b_g)?,
        b_m2: f("actuator", "actuator.b_m2", base.b_m2)?,
        b_l: f("actuator", "actuator.b_l", base.b_l)?,
        gear_ratio: f("actuator", "actuator.gear_ratio", base.gear_ratio)?,
        tau_m1_max: f("actuator", "actuator.tau_m1_max", base.tau_m1_max)?,
        tau_m2_max: f("actuator", "actuator.tau_m2_max", base.tau_m2_max)?,
        vsam: vsam_config,
        model,
    };
    actuator
        .validate()
        .map_err(|e| validation("actuator", e.to_string()))?;

    let physics_dt = f("sim", "sim.physics_dt", 1e-4)?;
    let control_dt = f("sim", "sim.control_dt", 1e-3)?;
    if !(physics_dt > 0.0) || !(control_dt > 0.0) {
        return Err(validation("sim", "time steps must be positive"));
    }
    let ratio = control_dt / physics_dt;
    if ratio < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
        return Err(validation(
            "sim",
            format!(
                "control_dt ({control_dt}) must be an integer multiple of physics_dt ({physics_dt})"
            ),
        ));
    }

    Ok(RunConfig {
        actuator,
        physics_dt,
        control_dt,
        out_dir: get("run.out_dir").map(str::to_string),
        scenario: get("run.scenario").map(str::to_string),
    })
}

/// Load a configuration file over the defaults.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let layer = ConfigLayer::parse(&text)?;
    resolve(&layer)
}

/// Load a configuration file and apply command-line overrides on top.
pub fn load_config_with_overrides(
    path: Option<&Path>,
    overrides: &ConfigLayer,
) -> Result<RunConfig, ConfigError> {
    let file_layer = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError::Io(format!("{}: {e}", p.display())))?;
            ConfigLayer::parse(&text)?
        }
        None => ConfigLayer::new(),
    };
    resolve(&file_layer.merged(overrides))
}
