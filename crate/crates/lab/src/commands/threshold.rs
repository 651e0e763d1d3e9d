use serde_json::json;

use h3wave::threshold::{threshold_report, Threshold, ThresholdReport, Q};

use crate::error::LabResult;
use crate::output::OutputDir;

pub fn compute() -> ThresholdReport {
    threshold_report()
}

pub fn ratio_string(q: Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn threshold_string(t: Threshold) -> String {
    match t {
        Threshold::Above(q) => format!("s > {}", ratio_string(q)),
        Threshold::Below(q) => format!("s < {}", ratio_string(q)),
        Threshold::Always => "every s".into(),
        Threshold::Never => "no s".into(),
    }
}

pub fn write(r: &ThresholdReport, out: &mut OutputDir) -> LabResult<()> {
    println!("threshold: s > {} ≈ {:.5}", ratio_string(r.threshold), r.decimal);
    println!("  constant right-side reading: {}", threshold_string(r.constant_right_side));
    if r.discrepancy {
        println!(
            "  note: the bootstrap statement quotes s > {}, which differs from the solved value",
            ratio_string(r.stated_bootstrap)
        );
    }
    out.record(json!({
        "record": "threshold",
        "threshold": ratio_string(r.threshold),
        "decimal": r.decimal,
        "constant_right_side": threshold_string(r.constant_right_side),
        "stated_bootstrap": ratio_string(r.stated_bootstrap),
        "discrepancy": r.discrepancy,
    }));
    Ok(())
}
