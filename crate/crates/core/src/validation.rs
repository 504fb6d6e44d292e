//! Independent reference computations and the self-check suite behind the
//! `validate` command.
//!
//! The elastica oracle here shares no code with the production solver: it
//! integrates the curvature equation `theta'' = -(F/EI) cos(theta)` as an
//! initial value problem on a fixed fine grid and shoots on the base
//! curvature until the moment-free condition `theta'(x_r) = 0` holds, by
//! plain bisection. Deflections come from co-integrated `x' = cos(theta)`,
//! `y' = sin(theta)`.

use crate::beam::{self, BeamSpec, SolverSettings};
use crate::vsam::{self, StiffnessModel, VsamConfig};

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Tip slope and deflections from the shooting-method oracle.
pub fn shooting_elastica(
    beam: &BeamSpec,
    effective_length: f64,
    force: f64,
    steps: usize,
) -> (f64, f64, f64) {
    if force == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let load = force / beam.flexural_rigidity();
    let h = effective_length / steps as f64;

    // State [theta, theta', x, y] integrated with RK4 from the clamp.
    let run = |base_curvature: f64| -> [f64; 4] {
        let f = |state: [f64; 4]| -> [f64; 4] {
            [
                state[1],
                -load * state[0].cos(),
                state[0].cos(),
                state[0].sin(),
            ]
        };
        let mut state = [0.0, base_curvature, 0.0, 0.0];
        for _ in 0..steps {
            let k1 = f(state);
            let k2 = f(add(state, k1, 0.5 * h));
            let k3 = f(add(state, k2, 0.5 * h));
            let k4 = f(add(state, k3, h));
            for i in 0..4 {
                state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        state
    };

    // theta'(x_r) grows monotonically with the base curvature; bracket the
    // moment-free condition and bisect.
    let mut lo = 0.0;
    let mut hi = load * effective_length;
    let mut guard = 0;
    while run(hi)[1] < 0.0 {
        hi *= 2.0;
        guard += 1;
        assert!(guard < 60, "shooting bracket failed to expand");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if run(mid)[1] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let state = run(0.5 * (lo + hi));
    (state[0], effective_length - state[2], state[3])
}

fn add(state: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [
        state[0] + h * k[0],
        state[1] + h * k[1],
        state[2] + h * k[2],
        state[3] + h * k[3],
    ]
}

/// Deterministic 64-bit LCG (Numerical Recipes constants) for reproducible
/// test point sets without an RNG dependency.
pub struct Lcg(u64);

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform sample in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform sample in [lo, hi).
    pub fn sample(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

const ORACLE_STEPS: usize = 10_000;
const ORACLE_TOL: f64 = 1e-5;

/// Forward solver against the shooting oracle over the load grid.
pub fn check_elastica_oracle(settings: &SolverSettings) -> CheckResult {
    let beam = BeamSpec {
        youngs_modulus: 200e9,
        area_moment: 1e-11,
        full_length: 0.1,
    };
    let span = beam.full_length;
    let mut worst: f64 = 0.0;
    for alpha in [0.1, 0.5, 1.0, 2.0] {
        let force = alpha * beam.flexural_rigidity() / (span * span);
        let solution = match beam::solve_deflection(&beam, span, force, settings) {
            Ok(s) => s,
            Err(e) => return CheckResult::new("elastica_oracle", false, format!("solver: {e}")),
        };
        let (phi, dx, dy) = shooting_elastica(&beam, span, force, ORACLE_STEPS);
        worst = worst
            .max(((solution.tip_slope - phi) / phi).abs())
            .max(((solution.deflection_x - dx) / dx).abs())
            .max(((solution.deflection_y - dy) / dy).abs());
    }
    CheckResult::new(
        "elastica_oracle",
        worst <= ORACLE_TOL,
        format!("worst relative deviation {worst:.3e} (tolerance {ORACLE_TOL:.0e})"),
    )
}

/// Small-load limits of the elastica against the linear cantilever formulas.
pub fn check_small_load_limits(settings: &SolverSettings) -> CheckResult {
    let beam = BeamSpec {
        youngs_modulus: 200e9,
        area_moment: 1e-11,
        full_length: 0.1,
    };
    let span = beam.full_length;
    let rigidity = beam.flexural_rigidity();
    let mut detail = String::new();
    let mut passed = true;
    for (alpha, bound) in [(0.01, 0.01), (0.001, 0.001)] {
        let force = alpha * rigidity / (span * span);
        let solution = match beam::solve_deflection(&beam, span, force, settings) {
            Ok(s) => s,
            Err(e) => return CheckResult::new("small_load_limits", false, format!("solver: {e}")),
        };
        let slope_error =
            (solution.tip_slope / (force * span * span / (2.0 * rigidity)) - 1.0).abs();
        let deflection_error =
            (solution.deflection_y / (force * span.powi(3) / (3.0 * rigidity)) - 1.0).abs();
        passed &= slope_error < bound && deflection_error < bound;
        detail.push_str(&format!(
            "alpha={alpha}: slope {slope_error:.2e}, deflection {deflection_error:.2e}; "
        ));
    }
    CheckResult::new("small_load_limits", passed, detail)
}

/// Closed-form stiffness against a finite difference of the closed-form
/// torque at 100 reproducible sample points.
pub fn check_sdm_gradient(config: &VsamConfig) -> CheckResult {
    let mut rng = Lcg::new(0x5eed);
    let mut worst: f64 = 0.0;
    let h = 1e-6;
    for _ in 0..100 {
        let q = rng.sample(-config.deflection_limit + h, config.deflection_limit - h);
        let x = rng.sample(config.x_min, config.x_max);
        let q_m2 = x / config.eta();
        let k = vsam::stiffness(config, StiffnessModel::SmallDeflection, q_m2, q).unwrap();
        let above =
            vsam::spring_torque(config, StiffnessModel::SmallDeflection, q_m2, q + h).unwrap();
        let below =
            vsam::spring_torque(config, StiffnessModel::SmallDeflection, q_m2, q - h).unwrap();
        let fd = (above - below) / (2.0 * h);
        worst = worst.max(((k - fd) / k).abs());
    }
    CheckResult::new(
        "sdm_stiffness_gradient",
        worst <= 1e-6,
        format!("worst relative deviation {worst:.3e} over 100 points"),
    )
}

/// Inverse solver round trip through the forward solver.
pub fn check_inverse_round_trip(settings: &SolverSettings) -> CheckResult {
    let beam = BeamSpec {
        youngs_modulus: 200e9,
        area_moment: 1e-11,
        full_length: 0.1,
    };
    let span = beam.full_length;
    let mut worst: f64 = 0.0;
    for fraction in [0.05, 0.2, 0.4] {
        let target = fraction * span;
        let force = match beam::solve_force_for_deflection(&beam, span, target, settings) {
            Ok(f) => f,
            Err(e) => return CheckResult::new("inverse_round_trip", false, format!("solver: {e}")),
        };
        let forward = match beam::solve_deflection(&beam, span, force, settings) {
            Ok(s) => s,
            Err(e) => return CheckResult::new("inverse_round_trip", false, format!("solver: {e}")),
        };
        worst = worst.max(((forward.deflection_y - target) / target).abs());
    }
    CheckResult::new(
        "inverse_round_trip",
        worst <= 1e-8,
        format!("worst relative deviation {worst:.3e}"),
    )
}

/// Geometric sanity: the deflected chord never exceeds the arc length.
pub fn check_arc_chord(settings: &SolverSettings) -> CheckResult {
    let beam = BeamSpec {
        youngs_modulus: 200e9,
        area_moment: 1e-11,
        full_length: 0.1,
    };
    let span = beam.full_length;
    let mut worst: f64 = 0.0;
    for i in 1..=25 {
        let force = 0.2 * i as f64 * beam.flexural_rigidity() / (span * span);
        let s = match beam::solve_deflection(&beam, span, force, settings) {
            Ok(s) => s,
            Err(e) => return CheckResult::new("arc_chord", false, format!("solver: {e}")),
        };
        let chord = ((span - s.deflection_x).powi(2) + s.deflection_y.powi(2)).sqrt();
        worst = worst.max(chord / span - 1.0);
    }
    CheckResult::new(
        "arc_chord",
        worst <= 1e-12,
        format!("max chord/arc excess {worst:.3e}"),
    )
}

/// The full check suite on a given mechanism configuration.
pub fn run_all_checks(config: &VsamConfig) -> Vec<CheckResult> {
    vec![
        check_elastica_oracle(&config.solver),
        check_small_load_limits(&config.solver),
        check_sdm_gradient(config),
        check_inverse_round_trip(&config.solver),
        check_arc_chord(&config.solver),
    ]
}
