use serde_json::json;

use h3wave::fit::{fit_log2, FitFailure, SlopeFit};
use h3wave::truncation::EnergyLedger;
use h3wave::GridRef;

use super::threshold;
use super::truncate::{self, ledger_summary, TruncationRun};
use crate::config::RunConfig;
use crate::error::LabResult;
use crate::output::{num, OutputDir};
use crate::pool::ordered_map;

/// A ledger quantity fitted against `s₀`, with the exponent of its bound.
pub struct Monitored {
    pub name: &'static str,
    pub value: fn(&EnergyLedger) -> f64,
    /// Exponent of the `s₀` power bounding the quantity, where one applies.
    pub predicted: fn(f64) -> Option<f64>,
    /// Slack on the predicted exponent; `None` means report only.
    pub tolerance: Option<f64>,
}

pub const MONITORED: &[Monitored] = &[
    Monitored {
        name: "sup_E_v",
        value: |l| l.sup_e_v,
        predicted: |s| Some(1.75 * s - 1.5),
        tolerance: Some(0.15),
    },
    Monitored {
        name: "max_dE",
        value: |l| l.max_d_e,
        predicted: |s| Some(19.0 / 16.0 * s - 9.0 / 8.0),
        tolerance: Some(0.15),
    },
    Monitored {
        name: "sup_psi_L4",
        value: |l| l.sup_psi_l4,
        predicted: |s| Some(0.5 * (s - 0.5)),
        tolerance: Some(0.1),
    },
    Monitored {
        name: "sup_v_L4",
        value: |l| l.sup_v_l4_st,
        predicted: |s| Some(0.5 * (s - 0.5)),
        tolerance: None,
    },
    Monitored {
        name: "sup_v_L8_3_L8",
        value: |l| l.sup_v_strichartz,
        predicted: |s| (s >= 0.75).then_some(0.5 * (s - 0.75)),
        tolerance: None,
    },
    Monitored {
        name: "sup_E_phi",
        value: |l| l.sup_e_phi,
        predicted: |s| Some(-(1.0 - s)),
        tolerance: None,
    },
    Monitored {
        name: "sup_phi_L8_3_L8",
        value: |l| l.sup_phi_strichartz,
        predicted: |s| Some(-0.5 * (1.0 - s)),
        tolerance: None,
    },
    Monitored {
        name: "sup_t_v_L4x",
        value: |l| l.sup_v_l4,
        predicted: |_| None,
        tolerance: None,
    },
    Monitored {
        name: "l4_total",
        value: |l| l.l4_total,
        predicted: |_| None,
        tolerance: None,
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    /// `slope - slope_error ≥ predicted - tolerance`.
    Pass,
    Fail,
    Report,
    Degenerate(FitFailure),
}

impl FitStatus {
    pub fn label(self) -> &'static str {
        match self {
            FitStatus::Pass => "pass",
            FitStatus::Fail => "fail",
            FitStatus::Report => "report",
            FitStatus::Degenerate(FitFailure::Degenerate) => "degenerate: zero or non-finite values",
            FitStatus::Degenerate(FitFailure::TooFewPoints) => "degenerate: too few points",
            FitStatus::Degenerate(FitFailure::NoSpread) => "degenerate: no spread in s0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRow {
    pub s: f64,
    pub quantity: &'static str,
    pub fit: Option<SlopeFit>,
    pub predicted: Option<f64>,
    pub tolerance: Option<f64>,
    pub status: FitStatus,
}

pub struct SweepResult {
    pub runs: Vec<TruncationRun>,
    pub fits: Vec<FitRow>,
}

impl SweepResult {
    pub fn fit(&self, s: f64, quantity: &str) -> Option<&FitRow> {
        self.fits.iter().find(|f| f.s == s && f.quantity == quantity)
    }
}

pub fn fit_quantities(runs: &[TruncationRun], s: f64) -> Vec<FitRow> {
    let points: Vec<&TruncationRun> = runs.iter().filter(|r| r.s == s).collect();
    let x: Vec<f64> = points.iter().map(|r| r.s0).collect();
    MONITORED
        .iter()
        .map(|m| {
            let y: Vec<f64> = points.iter().map(|r| (m.value)(&r.ledger)).collect();
            let predicted = (m.predicted)(s);
            let (fit, status) = match fit_log2(&x, &y) {
                Err(e) => (None, FitStatus::Degenerate(e)),
                Ok(f) => {
                    let status = match (predicted, m.tolerance) {
                        (Some(p), Some(tol)) if f.slope - f.slope_error >= p - tol => FitStatus::Pass,
                        (Some(_), Some(_)) => FitStatus::Fail,
                        _ => FitStatus::Report,
                    };
                    (Some(f), status)
                }
            };
            FitRow {
                s,
                quantity: m.name,
                fit,
                predicted,
                tolerance: m.tolerance.filter(|_| predicted.is_some()),
                status,
            }
        })
        .collect()
}

/// Runs every `(s, s₀)` point on up to `workers` threads and fits each
/// monitored quantity against `s₀` for every `s`.
pub fn compute(cfg: &RunConfig, grid: &GridRef, workers: usize) -> LabResult<SweepResult> {
    let points: Vec<(f64, f64)> = cfg
        .sweep_s
        .iter()
        .flat_map(|&s| cfg.sweep_s0.iter().map(move |&s0| (s, s0)))
        .collect();
    let results = ordered_map(&points, workers, |&(s, s0)| {
        let mut point = cfg.clone();
        point.scheme.s0 = s0;
        point.data.s = s;
        truncate::compute(&point, grid, &point.data, false)
    });
    let runs = results.into_iter().collect::<LabResult<Vec<_>>>()?;
    let fits = cfg.sweep_s.iter().flat_map(|&s| fit_quantities(&runs, s)).collect();
    Ok(SweepResult { runs, fits })
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write(result: &SweepResult, out: &mut OutputDir) -> LabResult<()> {
    let mut rows = out.csv(
        "sweep.csv",
        &[
            "s",
            "s0",
            "intervals",
            "interval_bound",
            "l4_total",
            "sup_E_phi",
            "sup_E_v",
            "max_dE",
            "total_dE",
            "sup_psi_L4",
            "sup_v_L4",
            "sup_v_L8_3_L8",
            "sup_phi_L8_3_L8",
            "identity_max",
            "bootstrap_M",
            "bootstrap_holds",
        ],
    )?;
    for r in &result.runs {
        let l = &r.ledger;
        rows.row([
            num(r.s),
            num(r.s0),
            l.intervals.to_string(),
            l.interval_bound.to_string(),
            num(l.l4_total),
            num(l.sup_e_phi),
            num(l.sup_e_v),
            num(l.max_d_e),
            num(l.total_d_e),
            num(l.sup_psi_l4),
            num(l.sup_v_l4_st),
            num(l.sup_v_strichartz),
            num(l.sup_phi_strichartz),
            num(l.identity_max),
            num(r.bootstrap.m),
            r.bootstrap.holds.to_string(),
        ])?;
        let mut record = ledger_summary(r);
        record["record"] = json!("sweep_point");
        out.record(record);
    }
    rows.close()?;

    let mut fits = out.csv(
        "fits.csv",
        &["s", "quantity", "slope", "residual", "slope_error", "points", "predicted", "tolerance", "status"],
    )?;
    for f in &result.fits {
        fits.row([
            num(f.s),
            f.quantity.to_string(),
            opt(f.fit.map(|x| x.slope)),
            opt(f.fit.map(|x| x.residual)),
            opt(f.fit.map(|x| x.slope_error)),
            f.fit.map_or(0, |x| x.points).to_string(),
            opt(f.predicted),
            opt(f.tolerance),
            f.status.label().to_string(),
        ])?;
        println!(
            "sweep: s = {} {:<16} slope {} ± {} (residual {}), bound {} - {}: {}",
            f.s,
            f.quantity,
            opt(f.fit.map(|x| x.slope)),
            opt(f.fit.map(|x| x.slope_error)),
            opt(f.fit.map(|x| x.residual)),
            opt(f.predicted),
            opt(f.tolerance),
            f.status.label()
        );
        out.record(json!({
            "record": "fit",
            "s": f.s,
            "quantity": f.quantity,
            "slope": f.fit.map(|x| x.slope),
            "residual": f.fit.map(|x| x.residual),
            "slope_error": f.fit.map(|x| x.slope_error),
            "predicted": f.predicted,
            "tolerance": f.tolerance,
            "status": f.status.label(),
        }));
    }
    fits.close()?;

    let t = threshold::compute();
    out.record(json!({
        "record": "bootstrap",
        "points": result.runs.len(),
        "holds_everywhere": result.runs.iter().all(|r| r.bootstrap.holds),
        "interval_bound_everywhere": result.runs.iter().all(|r| r.ledger.intervals <= r.ledger.interval_bound),
        "threshold": threshold::ratio_string(t.threshold),
        "above_threshold": result.runs.iter().map(|r| r.s > t.decimal).collect::<Vec<_>>(),
    }));
    Ok(())
}
