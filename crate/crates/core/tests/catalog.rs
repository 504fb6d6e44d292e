//! Whole-catalog integration checks: every built-in scenario must run to
//! completion with finite logs, non-negative energies, bounded stiffness-motor
//! commands, and no sustained stiffness-motor saturation.

use vssea_core::dynamics::ActuatorParams;
use vssea_core::experiments::{energy_report, run_scenario, scenario_catalog};

#[test]
fn every_catalog_scenario_runs_clean() {
    let params = ActuatorParams::default_calibrated();
    let scenarios = scenario_catalog(&params, 1e-4, 1e-3);
    assert!(scenarios.len() >= 14);

    for scenario in &scenarios {
        let result =
            run_scenario(scenario).unwrap_or_else(|e| panic!("{} failed: {e}", scenario.name));
        let name = &scenario.name;

        let expected_rows = (scenario.duration / scenario.control_dt).round() as usize + 1;
        assert_eq!(result.len(), expected_rows, "{name}: row count");

        let channels: [&[f64]; 15] = [
            &result.time,
            &result.q_m1,
            &result.q_g,
            &result.q_l,
            &result.q_m2,
            &result.qd_m1,
            &result.qd_l,
            &result.qd_m2,
            &result.tau_m1_cmd,
            &result.tau_m2_cmd,
            &result.tau_s,
            &result.tau_s_dis,
            &result.stiffness,
            &result.stored_energy,
            &result.m2_energy_cost,
        ];
        for (index, channel) in channels.iter().enumerate() {
            assert!(
                channel.iter().all(|v| v.is_finite()),
                "{name}: channel {index} has non-finite samples"
            );
        }

        // Energy bookkeeping: stored energy and cost non-negative, cost
        // non-decreasing.
        assert!(result.stored_energy.iter().all(|&u| u >= 0.0), "{name}");
        assert!(result.m2_energy_cost.iter().all(|&c| c >= 0.0), "{name}");
        assert!(
            result
                .m2_energy_cost
                .windows(2)
                .all(|pair| pair[1] >= pair[0]),
            "{name}: cost decreased"
        );
        let report = energy_report(&result);
        assert!(report.total_cost >= 0.0);

        // Stiffness-motor command bounded, and never saturated for more than
        // half a second at a stretch.
        let limit = scenario.params.tau_m2_max;
        assert!(
            result
                .tau_m2_cmd
                .iter()
                .all(|t| t.abs() <= limit * (1.0 + 1e-12)),
            "{name}: stiffness-motor command exceeds the shaft limit"
        );
        let mut run_start: Option<f64> = None;
        let mut longest: f64 = 0.0;
        for i in 0..result.len() {
            if result.tau_m2_cmd[i].abs() >= 0.999 * limit {
                let start = *run_start.get_or_insert(result.time[i]);
                longest = longest.max(result.time[i] - start);
            } else {
                run_start = None;
            }
        }
        assert!(
            longest <= 0.5,
            "{name}: stiffness motor saturated for {longest:.2} s"
        );

        // Metrics must be recomputable from the log.
        let recomputed = vssea_core::experiments::compute_metrics(scenario, &result);
        assert!(
            (recomputed.rms_error - result.metrics.rms_error).abs() <= 1e-12,
            "{name}: rms mismatch"
        );
    }
}

#[test]
fn tracking_error_ranking_across_modes_and_speeds() {
    let params = ActuatorParams::default_calibrated();
    let scenarios = scenario_catalog(&params, 1e-4, 1e-3);
    let rms = |name: &str| {
        let scenario = scenarios.iter().find(|s| s.name == name).unwrap();
        run_scenario(scenario).unwrap().metrics.rms_error
    };
    let soft_slow = rms("fig11_soft_0p1hz_halfpi");
    let soft_fast = rms("fig11_soft_1hz_halfpi");
    let stiff_fast = rms("fig11_stiff_1hz_halfpi");
    // Raising the trajectory speed wrecks soft-mode tracking; stiffening
    // recovers it.
    assert!(
        soft_fast > 2.0 * soft_slow,
        "soft: 1 Hz rms {soft_fast:.3} vs 0.1 Hz rms {soft_slow:.3}"
    );
    assert!(
        stiff_fast < soft_fast,
        "1 Hz: stiff rms {stiff_fast:.3} vs soft rms {soft_fast:.3}"
    );
}
