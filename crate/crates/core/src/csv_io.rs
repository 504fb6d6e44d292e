//! CSV output schema for scenario logs and static sweeps.
//!
//! One header row, one row per control-grid sample, nine significant digits
//! per value, newline-terminated. The column order is part of the external
//! interface and pinned by a golden test.

use crate::experiments::{Metrics, ScenarioResult, SweepTable};
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Scenario log column order.
pub const CSV_HEADER: &str = "t,q_m1,q_g,q_l,q_m2,qd_m1,qd_l,qd_m2,tau_m1_cmd,tau_m2_cmd,tau_s,tau_s_dis,k,stored_energy,m2_energy_cost";

/// Static sweep column order.
pub const SWEEP_HEADER: &str = "q_l,x_r,tau_ldm,tau_sdm,k_ldm,k_sdm";

fn format_value(v: f64) -> String {
    // 9 significant digits.
    format!("{v:.8e}")
}

/// Write one scenario log. Empty series produce a header-only file.
pub fn write_csv(result: &ScenarioResult, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{CSV_HEADER}")?;
    for i in 0..result.len() {
        let row = [
            result.time[i],
            result.q_m1[i],
            result.q_g[i],
            result.q_l[i],
            result.q_m2[i],
            result.qd_m1[i],
            result.qd_l[i],
            result.qd_m2[i],
            result.tau_m1_cmd[i],
            result.tau_m2_cmd[i],
            result.tau_s[i],
            result.tau_s_dis[i],
            result.stiffness[i],
            result.stored_energy[i],
            result.m2_energy_cost[i],
        ];
        let line: Vec<String> = row.iter().copied().map(format_value).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}

/// Columns of a scenario log read back from disk, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSeries {
    pub columns: Vec<Vec<f64>>,
}

impl CsvSeries {
    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Read a scenario log written by [`write_csv`].
pub fn read_csv(path: &Path) -> io::Result<CsvSeries> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty CSV file"))?;
    if header != CSV_HEADER {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {header}"),
        ));
    }
    let width = CSV_HEADER.split(',').count();
    let mut columns = vec![Vec::new(); width];
    for (index, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!(
                    "row {} has {} fields, expected {width}",
                    index + 2,
                    fields.len()
                ),
            ));
        }
        for (column, field) in columns.iter_mut().zip(fields) {
            let value: f64 = field.parse().map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("row {}: {e}", index + 2),
                )
            })?;
            column.push(value);
        }
    }
    Ok(CsvSeries { columns })
}

/// Write the metrics summary as `key = value` lines.
pub fn write_metrics(name: &str, metrics: &Metrics, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "scenario = {name}")?;
    writeln!(out, "rms_error = {}", format_value(metrics.rms_error))?;
    writeln!(
        out,
        "max_overshoot = {}",
        format_value(metrics.max_overshoot)
    )?;
    writeln!(
        out,
        "settling_time = {}",
        format_value(metrics.settling_time)
    )?;
    writeln!(
        out,
        "peak_disturbance_torque = {}",
        format_value(metrics.peak_disturbance_torque)
    )?;
    writeln!(out, "energy_cost = {}", format_value(metrics.energy_cost))?;
    out.flush()
}

/// Write a static model-comparison sweep.
pub fn write_sweep_csv(table: &SweepTable, path: &Path) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{SWEEP_HEADER}")?;
    for row in &table.rows {
        let fields = [
            row.q_l,
            row.x_r,
            row.tau_ldm,
            row.tau_sdm,
            row.k_ldm,
            row.k_sdm,
        ];
        let line: Vec<String> = fields.iter().copied().map(format_value).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()
}
