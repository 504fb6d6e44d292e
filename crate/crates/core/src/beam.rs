//! Planar large-deflection cantilever statics for a single leaf spring.
//!
//! One spring is clamped at the frame and loaded transversely by a
//! frictionless roller an arc length `x_r` from the clamp. With tip slope
//! `phi_t` and flexural rigidity `EI`, the first integral of the elastica
//! equation `EI d^2(phi)/ds^2 = -F cos(phi)` gives
//!
//! ```text
//! s(phi)   = sqrt(EI / 2F) * Int[0..phi]   dpsi          / sqrt(sin phi_t - sin psi)
//! x(phi_t) = sqrt(EI / 2F) * Int[0..phi_t] cos(psi) dpsi / sqrt(sin phi_t - sin psi)
//! y(phi_t) = sqrt(EI / 2F) * Int[0..phi_t] sin(psi) dpsi / sqrt(sin phi_t - sin psi)
//! ```
//!
//! The forward problem (force -> tip slope and deflections) pins `phi_t` by
//! requiring `s(phi_t) = x_r`; the inverse problem (deflection -> force) pins
//! it through the force-free ratio `y/s`, then recovers the force from the
//! arc-length relation. The integrands blow up like an inverse square root at
//! `psi -> phi_t`; the substitution `sin psi = sin(phi_t) (1 - t^2)` removes
//! the singularity and leaves smooth integrands on t in [0, 1], handled by a
//! fixed-order Gauss-Legendre rule.

use crate::quadrature;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Keep-away margin from the vertical-tangent limit of the 2D model.
const SLOPE_MARGIN: f64 = 1e-6;
/// Lower bracket edge for tip-slope searches.
const SLOPE_FLOOR: f64 = 1e-14;

/// Elastic and geometric description of one leaf spring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSpec {
    /// Young's modulus E (Pa).
    pub youngs_modulus: f64,
    /// Second moment of area I of the cross section (m^4).
    pub area_moment: f64,
    /// Free length of the spring from clamp to tip (m).
    pub full_length: f64,
}

impl BeamSpec {
    pub fn new(youngs_modulus: f64, area_moment: f64, full_length: f64) -> Result<Self, BeamError> {
        let spec = Self {
            youngs_modulus,
            area_moment,
            full_length,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        if !(self.youngs_modulus > 0.0) || !self.youngs_modulus.is_finite() {
            return Err(BeamError::InvalidInput("youngs_modulus must be positive"));
        }
        if !(self.area_moment > 0.0) || !self.area_moment.is_finite() {
            return Err(BeamError::InvalidInput("area_moment must be positive"));
        }
        if !(self.full_length > 0.0) || !self.full_length.is_finite() {
            return Err(BeamError::InvalidInput("full_length must be positive"));
        }
        Ok(())
    }

    /// Flexural rigidity EI (N m^2).
    pub fn flexural_rigidity(&self) -> f64 {
        self.youngs_modulus * self.area_moment
    }
}

/// Static solution of the loaded spring at the roller station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticaSolution {
    /// Slope of the beam at the roller contact (rad).
    pub tip_slope: f64,
    /// Shortening of the contact point along the clamped axis (m).
    pub deflection_x: f64,
    /// Transverse deflection of the contact point (m).
    pub deflection_y: f64,
    /// Transverse force carried by the roller (N).
    pub applied_force: f64,
    /// Arc length from clamp to roller (m).
    pub effective_length: f64,
}

impl ElasticaSolution {
    fn straight(effective_length: f64) -> Self {
        Self {
            tip_slope: 0.0,
            deflection_x: 0.0,
            deflection_y: 0.0,
            applied_force: 0.0,
            effective_length,
        }
    }
}

/// Numerical controls for the elastica solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Relative residual tolerance of the root searches.
    pub residual_tol: f64,
    /// Iteration cap for the root searches.
    pub max_iterations: u32,
    /// Node count of the Gauss-Legendre rule.
    pub quadrature_points: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 200,
            quadrature_points: 64,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), BeamError> {
        if !(self.residual_tol > 0.0) || !self.residual_tol.is_finite() {
            return Err(BeamError::InvalidInput("residual_tol must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(BeamError::InvalidInput("max_iterations must be positive"));
        }
        if self.quadrature_points < 16 {
            return Err(BeamError::InvalidInput("quadrature_points must be >= 16"));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeamError {
    #[error("root search did not meet the residual tolerance within {iterations} iterations")]
    NoConvergence { iterations: u32 },
    #[error("required tip slope reaches 90 degrees; force too large for the planar elastica")]
    SlopeOutOfRange,
    #[error("target deflection exceeds the reachable tip deflection at this roller position")]
    DeflectionUnreachable,
    #[error("quadrature produced a non-finite value")]
    QuadratureFailure,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

/// The three elastica integrals after the de-singularising substitution.
///
/// Each physical length equals `sqrt(EI / 2F)` times the returned factor:
/// `(arc, x, y)`. The x-integrand collapses to the constant `2 sqrt(sin
/// phi_t)` because `cos(psi) dpsi` is the exact differential of the root.
fn elastica_integrals(tip_slope: f64, points: usize) -> (f64, f64, f64) {
    let s = tip_slope.sin();
    let sqrt_s = s.sqrt();
    quadrature::with_rule(points, |rule| {
        let mut arc = 0.0;
        let mut x = 0.0;
        let mut y = 0.0;
        for &(node, weight) in rule {
            let t = 0.5 * (node + 1.0);
            let w = 0.5 * weight;
            let z = s * (1.0 - t * t);
            let root = (1.0 - z * z).sqrt();
            arc += w * 2.0 * sqrt_s / root;
            x += w * 2.0 * sqrt_s;
            y += w * 2.0 * sqrt_s * z / root;
        }
        (arc, x, y)
    })
}

/// Bracketed hybrid root search: secant steps on the current bracket with a
/// bisection fallback whenever the secant candidate leaves the interval.
/// Succeeds when |f| drops below `f_tol`.
fn hybrid_root(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    f_tol: f64,
    max_iterations: u32,
) -> Result<f64, BeamError> {
    debug_assert!(f_lo <= 0.0 && f_hi >= 0.0);
    // Illinois weighting stops the stagnant-endpoint failure mode of plain
    // false position on convex residuals.
    let mut side = 0i8;
    for _ in 0..max_iterations {
        let denom = f_hi - f_lo;
        let mut x = if denom.abs() > f64::MIN_POSITIVE {
            hi - f_hi * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !x.is_finite() || x <= lo || x >= hi {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(BeamError::QuadratureFailure);
        }
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= f64::EPSILON * hi.abs() {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(BeamError::NoConvergence {
        iterations: max_iterations,
    })
}

fn check_span(beam: &BeamSpec, effective_length: f64) -> Result<(), BeamError> {
    if !(effective_length > 0.0) || effective_length > beam.full_length {
        return Err(BeamError::InvalidInput(
            "effective_length must lie in (0, full_length]",
        ));
    }
    Ok(())
}

/// Tip slope `phi_t` such that the arc length from clamp to roller equals
/// `effective_length` under the transverse force. Zero force gives zero slope
/// exactly.
pub fn solve_tip_slope(
    beam: &BeamSpec,
    effective_length: f64,
    force: f64,
    settings: &SolverSettings,
) -> Result<f64, BeamError> {
    beam.validate()?;
    settings.validate()?;
    check_span(beam, effective_length)?;
    if !(force >= 0.0) || !force.is_finite() {
        return Err(BeamError::InvalidInput("force must be non-negative"));
    }
    if force == 0.0 {
        return Ok(0.0);
    }
    let scale = (beam.flexural_rigidity() / (2.0 * force)).sqrt();
    let points = settings.quadrature_points;
    let residual = |phi: f64| scale * elastica_integrals(phi, points).0 - effective_length;

    let hi = FRAC_PI_2 - SLOPE_MARGIN;
    let f_hi = residual(hi);
    if f_hi < 0.0 {
        // Even at the steepest representable slope the arc is shorter than
        // the span, so no planar solution carries this force.
        return Err(BeamError::SlopeOutOfRange);
    }
    let lo = SLOPE_FLOOR;
    let f_lo = residual(lo);
    if f_lo >= 0.0 {
        // Root sits below the floor; the small-slope closed form
        // s = 2 scale sqrt(phi) is exact to this accuracy.
        return Ok((effective_length / (2.0 * scale)).powi(2));
    }
    hybrid_root(
        residual,
        lo,
        hi,
        f_lo,
        f_hi,
        settings.residual_tol * effective_length,
        settings.max_iterations,
    )
}

/// Full static solution for a given force: tip slope plus both deflection
/// components at the roller.
pub fn solve_deflection(
    beam: &BeamSpec,
    effective_length: f64,
    force: f64,
    settings: &SolverSettings,
) -> Result<ElasticaSolution, BeamError> {
    let tip_slope = solve_tip_slope(beam, effective_length, force, settings)?;
    if force == 0.0 {
        return Ok(ElasticaSolution::straight(effective_length));
    }
    let scale = (beam.flexural_rigidity() / (2.0 * force)).sqrt();
    let (_, ix, iy) = elastica_integrals(tip_slope, settings.quadrature_points);
    let x_tip = scale * ix;
    let y_tip = scale * iy;
    if !x_tip.is_finite() || !y_tip.is_finite() {
        return Err(BeamError::QuadratureFailure);
    }
    Ok(ElasticaSolution {
        tip_slope,
        // Arc length bounds the chord, so the axial shortening is
        // non-negative; clip the rounding residue at zero.
        deflection_x: (effective_length - x_tip).max(0.0),
        deflection_y: y_tip,
        applied_force: force,
        effective_length,
    })
}

/// Inverse problem: the force that produces `target_dy` at the roller.
///
/// The ratio `y/s` of the elastica integrals depends on the tip slope alone,
/// so the slope is found first from the deflection ratio and the force then
/// follows from the arc-length relation; the returned solution round-trips
/// through [`solve_deflection`] to the residual tolerance.
pub fn solve_for_deflection(
    beam: &BeamSpec,
    effective_length: f64,
    target_dy: f64,
    settings: &SolverSettings,
) -> Result<ElasticaSolution, BeamError> {
    beam.validate()?;
    settings.validate()?;
    check_span(beam, effective_length)?;
    if !(target_dy >= 0.0) || target_dy >= effective_length {
        return Err(BeamError::InvalidInput(
            "target_dy must lie in [0, effective_length)",
        ));
    }
    if target_dy == 0.0 {
        return Ok(ElasticaSolution::straight(effective_length));
    }
    let points = settings.quadrature_points;
    let target_ratio = target_dy / effective_length;
    let residual = |phi: f64| {
        let (arc, _, y) = elastica_integrals(phi, points);
        y / arc - target_ratio
    };

    let hi = FRAC_PI_2 - SLOPE_MARGIN;
    let f_hi = residual(hi);
    if f_hi < 0.0 {
        return Err(BeamError::DeflectionUnreachable);
    }
    let lo = SLOPE_FLOOR;
    let f_lo = residual(lo);
    let tip_slope = hybrid_root(
        residual,
        lo,
        hi,
        f_lo,
        f_hi,
        settings.residual_tol * target_ratio,
        settings.max_iterations,
    )?;
    let (arc, ix, _) = elastica_integrals(tip_slope, points);
    let rigidity = beam.flexural_rigidity();
    let force = rigidity * arc * arc / (2.0 * effective_length * effective_length);
    let scale = (rigidity / (2.0 * force)).sqrt();
    Ok(ElasticaSolution {
        tip_slope,
        deflection_x: (effective_length - scale * ix).max(0.0),
        deflection_y: target_dy,
        applied_force: force,
        effective_length,
    })
}

/// Force that produces `target_dy` at the roller (see [`solve_for_deflection`]).
pub fn solve_force_for_deflection(
    beam: &BeamSpec,
    effective_length: f64,
    target_dy: f64,
    settings: &SolverSettings,
) -> Result<f64, BeamError> {
    solve_for_deflection(beam, effective_length, target_dy, settings)
        .map(|solution| solution.applied_force)
}

/// Linear cantilever end-load law `F = 3 EI d / L^3`; the small-deflection
/// limit of the inverse problem. No iteration.
pub fn small_deflection_force(beam: &BeamSpec, effective_length: f64, target_dy: f64) -> f64 {
    debug_assert!(effective_length > 0.0);
    3.0 * beam.flexural_rigidity() * target_dy / effective_length.powi(3)
}
