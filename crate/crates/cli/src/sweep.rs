//! Sweep execution and CSV/manifest output.
//!
//! Output bytes are independent of the worker count: Monte-Carlo chunks are
//! keyed by trial index and merged in index order, so parallelism only
//! changes wall time.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use risnoma_core::channel::x1_approximations;
use risnoma_core::closed_form::{er_d1_upper, er_d2_upper, op_d1, op_d2};
use risnoma_core::harvest::{mean_harvested_power, validity_zeta, EhParams};
use risnoma_core::mc::{
    chunk_bounds, harvest_estimates_from_acc, harvest_chunk, outage_chunk,
    outage_estimate_from_count, rate_chunk, Device, MetricEstimate, MomentAccumulator,
};
use risnoma_core::params::SystemParams;

use crate::config::{ConfigError, Metric, Mode, SweepSpec};

/// One computed value; `None` means the cell was requested but failed.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub analytic: Option<Option<f64>>,
    pub mc: Option<Option<MetricEstimate>>,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub run: String,
    pub axis_value: f64,
    pub cells: Vec<Cell>,
    pub in_region: bool,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub header: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub failed_cells: usize,
    pub total_cells: usize,
}

fn parallel_outage(p: &SystemParams, eh: &EhParams, dev: Device, n: u64, seed: u64) -> MetricEstimate {
    let bounds: Vec<(u64, u64)> = chunk_bounds(n).collect();
    let count: u64 = bounds
        .par_iter()
        .map(|&(s, e)| outage_chunk(p, eh, dev, s, e, seed))
        .sum();
    outage_estimate_from_count(count, n)
}

fn parallel_moments<F>(n: u64, chunk: F) -> MomentAccumulator
where
    F: Fn(u64, u64) -> MomentAccumulator + Sync,
{
    let bounds: Vec<(u64, u64)> = chunk_bounds(n).collect();
    let parts: Vec<MomentAccumulator> =
        bounds.par_iter().map(|&(s, e)| chunk(s, e)).collect();
    let mut acc = MomentAccumulator::new();
    for part in &parts {
        acc.merge(part);
    }
    acc
}

fn analytic_cell(p: &SystemParams, eh: &EhParams, metric: Metric) -> Option<f64> {
    let report = match metric {
        Metric::OpD1 => op_d1(p, eh),
        Metric::OpD2 => op_d2(p, eh),
        Metric::ErD1 => er_d1_upper(p, eh),
        Metric::ErD2 => er_d2_upper(p, eh),
        Metric::MeanPh => {
            let (_, x1sq) = x1_approximations(p).ok()?;
            return mean_harvested_power(p, eh, &x1sq).ok();
        }
    };
    report.ok().map(|r| r.value)
}

fn mc_cell(p: &SystemParams, eh: &EhParams, metric: Metric, n: u64, seed: u64) -> MetricEstimate {
    match metric {
        Metric::OpD1 => parallel_outage(p, eh, Device::D1, n, seed),
        Metric::OpD2 => parallel_outage(p, eh, Device::D2, n, seed),
        Metric::ErD1 => {
            parallel_moments(n, |s, e| rate_chunk(p, eh, Device::D1, s, e, seed)).mean_estimate()
        }
        Metric::ErD2 => {
            parallel_moments(n, |s, e| rate_chunk(p, eh, Device::D2, s, e, seed)).mean_estimate()
        }
        Metric::MeanPh => {
            let acc = parallel_moments(n, |s, e| harvest_chunk(p, eh, s, e, seed));
            harvest_estimates_from_acc(&acc).0
        }
    }
}

/// Column names for one run layout.
pub fn header(metrics: &[Metric], modes: &[Mode]) -> Vec<String> {
    let mut cols = vec!["run".to_string(), "axis".to_string()];
    for &m in metrics {
        if modes.contains(&Mode::Analytic) {
            cols.push(format!("{}_analytic", m.name()));
        }
        if modes.contains(&Mode::Mc) {
            cols.push(format!("{}_mc", m.name()));
            cols.push(format!("{}_mc_stderr", m.name()));
        }
    }
    cols.push("in_region".to_string());
    cols
}

/// Execute every run and collect rows in run/grid order.
pub fn run_sweep(runs: &[SweepSpec]) -> Result<SweepOutcome, ConfigError> {
    let metrics = runs[0].metrics.clone();
    let modes = runs[0].modes.clone();
    for r in runs {
        if r.metrics != metrics || r.modes != modes {
            return Err(ConfigError::Invalid(
                "all runs in one sweep must share metrics and modes".into(),
            ));
        }
    }
    let mut rows = Vec::new();
    let mut failed = 0usize;
    let mut total = 0usize;
    for run in runs {
        for &axis_value in &run.grid {
            let mut p = run.base;
            let mut eh = run.eh;
            run.axis.apply(&mut p, &mut eh, axis_value);
            let in_region = match x1_approximations(&p) {
                Ok((_, x1sq)) => validity_zeta(&p, &eh, &x1sq).1,
                Err(_) => false,
            };
            let mut cells = Vec::with_capacity(metrics.len());
            for &metric in &metrics {
                let analytic = if modes.contains(&Mode::Analytic) {
                    let v = analytic_cell(&p, &eh, metric);
                    total += 1;
                    if v.is_none() {
                        failed += 1;
                    }
                    Some(v)
                } else {
                    None
                };
                let mc = if modes.contains(&Mode::Mc) {
                    total += 1;
                    Some(Some(mc_cell(&p, &eh, metric, run.trials, run.seed)))
                } else {
                    None
                };
                cells.push(Cell { analytic, mc });
            }
            rows.push(SweepRow { run: run.label.clone(), axis_value, cells, in_region });
        }
    }
    Ok(SweepOutcome {
        header: header(&metrics, &modes),
        rows,
        failed_cells: failed,
        total_cells: total,
    })
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        // 10 significant digits.
        format!("{v:.9e}")
    }
}

fn opt(v: Option<f64>) -> String {
    fmt_value(v.unwrap_or(f64::NAN))
}

/// Render the outcome as CSV text.
pub fn render_csv(out: &SweepOutcome) -> String {
    let mut s = String::new();
    s.push_str(&out.header.join(","));
    s.push('\n');
    for row in &out.rows {
        let mut fields = vec![row.run.clone(), fmt_value(row.axis_value)];
        for cell in &row.cells {
            if let Some(a) = cell.analytic {
                fields.push(opt(a));
            }
            if let Some(m) = cell.mc {
                fields.push(opt(m.map(|e| e.mean)));
                fields.push(opt(m.map(|e| e.stderr)));
            }
        }
        fields.push(if row.in_region { "1".into() } else { "0".into() });
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// Manifest describing what produced the CSV. No timestamps: reruns of the
/// same invocation produce identical bytes.
pub fn render_manifest(runs: &[SweepSpec], out: &SweepOutcome, csv_name: &str) -> String {
    let runs_json: Vec<serde_json::Value> = runs
        .iter()
        .map(|r| {
            serde_json::json!({
                "label": r.label,
                "axis": r.axis.name(),
                "grid": r.grid,
                "pt_dbm": r.base.pt_dbm,
                "n_elements": r.base.n_elements,
                "alpha1": r.base.alpha1,
                "alpha2": r.base.alpha2,
                "rho": r.base.rho,
                "omega": r.base.omega,
                "eh_model": match r.eh {
                    EhParams::NonLinear { .. } => "nonlinear",
                    EhParams::Linear { .. } => "linear",
                },
                "eh_saturation_w": match r.eh {
                    EhParams::NonLinear { p_th, .. } => Some(p_th),
                    EhParams::Linear { .. } => None,
                },
                "trials": r.trials,
                "seed": r.seed,
            })
        })
        .collect();
    let manifest = serde_json::json!({
        "tool": "sweep",
        "version": env!("CARGO_PKG_VERSION"),
        "csv": csv_name,
        "columns": out.header,
        "rows": out.rows.len(),
        "failed_cells": out.failed_cells,
        "total_cells": out.total_cells,
        "metrics": runs[0].metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "modes": runs[0].modes.iter().map(|m| match m {
            Mode::Analytic => "analytic",
            Mode::Mc => "mc",
        }).collect::<Vec<_>>(),
        "runs": runs_json,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    text.push('\n');
    text
}

pub fn manifest_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    name.push_str(".manifest.json");
    csv_path.with_file_name(name)
}

/// Write CSV plus manifest beside it.
pub fn write_outputs(
    runs: &[SweepSpec],
    out: &SweepOutcome,
    csv_path: &Path,
) -> std::io::Result<()> {
    let csv = render_csv(out);
    let mut f = std::fs::File::create(csv_path)?;
    f.write_all(csv.as_bytes())?;
    let csv_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let manifest = render_manifest(runs, out, &csv_name);
    let mut f = std::fs::File::create(manifest_path(csv_path))?;
    f.write_all(manifest.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset_runs;

    #[test]
    fn csv_layout_matches_header() {
        let mut runs = preset_runs("fig4").unwrap();
        for r in &mut runs {
            r.trials = 2000;
            r.grid.truncate(3);
        }
        let out = run_sweep(&runs).unwrap();
        let csv = render_csv(&out);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert_eq!(
            header,
            "run,axis,op_d1_analytic,op_d1_mc,op_d1_mc_stderr,\
             op_d2_analytic,op_d2_mc,op_d2_mc_stderr,in_region"
        );
        let n_cols = header.split(',').count();
        let mut n_rows = 0;
        for line in lines {
            assert_eq!(line.split(',').count(), n_cols, "{line}");
            n_rows += 1;
        }
        assert_eq!(n_rows, 6);
    }

    #[test]
    fn values_use_ten_significant_digits() {
        assert_eq!(fmt_value(0.123456789012345), "1.234567890e-1");
        assert_eq!(fmt_value(-10.0), "-1.000000000e1");
        assert_eq!(fmt_value(f64::NAN), "nan");
    }

    #[test]
    fn mixed_metric_layouts_rejected() {
        let mut runs = preset_runs("fig4").unwrap();
        runs[1].metrics = vec![Metric::OpD1];
        assert!(run_sweep(&runs).is_err());
    }

    #[test]
    fn manifest_names_sit_beside_csv() {
        assert_eq!(
            manifest_path(Path::new("/tmp/x/run.csv")),
            Path::new("/tmp/x/run.manifest.json")
        );
    }
}
