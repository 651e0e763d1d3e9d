use serde_json::json;

use h3wave::evolve::Stepper;
use h3wave::scatter::{scattering_diagnostic, ScatterTable};
use h3wave::synth::synthesize;
use h3wave::GridRef;

use crate::config::RunConfig;
use crate::error::LabResult;
use crate::output::{num, OutputDir};

pub fn compute(cfg: &RunConfig, grid: &GridRef) -> LabResult<ScatterTable> {
    let data = synthesize(&cfg.data, grid)?;
    Ok(scattering_diagnostic(
        &data,
        &cfg.scatter_probes,
        cfg.dt,
        cfg.data.support_radius(grid),
        &Stepper::Cubic,
    )?)
}

/// Smallest ratio between consecutive probe-to-probe distances.
pub fn min_decay(table: &ScatterTable) -> f64 {
    table.decay_factors.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn write(table: &ScatterTable, out: &mut OutputDir) -> LabResult<()> {
    let mut csv = out.csv("scatter.csv", &["i", "j", "t_i", "t_j", "distance"])?;
    let n = table.probes.len();
    for i in 0..n {
        for j in i + 1..n {
            csv.row([
                i.to_string(),
                j.to_string(),
                num(table.probes[i]),
                num(table.probes[j]),
                num(table.pairwise[i][j]),
            ])?;
        }
    }
    csv.close()?;
    let decreasing = table.consecutive.windows(2).all(|w| w[1] < w[0]);
    for (k, d) in table.consecutive.iter().enumerate() {
        println!("scatter: |pullback({}) - pullback({})| = {:.4e}", table.probes[k], table.probes[k + 1], d);
    }
    println!("scatter: decay factors {:?}, decreasing: {decreasing}", table.decay_factors);
    out.record(json!({
        "record": "scatter",
        "probes": table.probes,
        "consecutive": table.consecutive,
        "decay_factors": table.decay_factors,
        "min_decay": min_decay(table),
        "decreasing": decreasing,
    }));
    Ok(())
}
