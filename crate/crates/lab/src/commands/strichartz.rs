use serde_json::json;

use h3wave::norms::{check_admissible, strichartz_gamma, strichartz_ratio};
use h3wave::synth::{synthesize, DataKind, DataSpec};
use h3wave::{GridRef, WaveState};

use crate::config::{RunConfig, TripleSpec};
use crate::error::LabResult;
use crate::output::{num, OutputDir};
use crate::pool::ordered_map;

pub struct CorpusField {
    pub label: String,
    pub state: WaveState,
}

/// Bumps whose radius follows `√s₀` across the configured scales, plus
/// cut-off power laws at the configured regularities.
pub fn corpus(cfg: &RunConfig, grid: &GridRef) -> LabResult<Vec<CorpusField>> {
    let mut fields = Vec::new();
    for radius in cfg.strichartz_radius_for_scales() {
        fields.push(CorpusField {
            label: format!("bump_R{radius}"),
            state: synthesize(&DataSpec::bump(1.0, radius), grid)?,
        });
    }
    for &s in &cfg.strichartz_s {
        let spec = DataSpec {
            kind: DataKind::PowerLaw,
            s,
            seed: cfg.data.seed,
            k_min: 1,
            amplitude: 1.0,
            support: cfg.strichartz_support,
        };
        fields.push(CorpusField {
            label: format!("power_law_s{s}"),
            state: synthesize(&spec, grid)?,
        });
    }
    Ok(fields)
}

/// A requested triple resolved against the admissible set.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTriple {
    pub p: f64,
    pub q: f64,
    pub gamma: Result<f64, String>,
}

pub fn resolve(t: &TripleSpec) -> ResolvedTriple {
    let gamma = match t.gamma {
        Some(g) => check_admissible(t.p, t.q, g).map(|_| g),
        None => strichartz_gamma(t.p, t.q),
    };
    ResolvedTriple {
        p: t.p,
        q: t.q,
        gamma: gamma.map_err(|e| e.to_string()),
    }
}

pub struct StrichartzRow {
    pub triple: usize,
    pub field: usize,
    pub ratio: f64,
}

pub struct StrichartzSuite {
    pub triples: Vec<ResolvedTriple>,
    pub labels: Vec<String>,
    pub rows: Vec<StrichartzRow>,
}

impl StrichartzSuite {
    pub fn ratios(&self, triple: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.triple == triple).map(|r| r.ratio).collect()
    }

    pub fn max_ratio(&self, triple: usize) -> Option<f64> {
        let r = self.ratios(triple);
        (!r.is_empty()).then(|| r.iter().cloned().fold(f64::MIN, f64::max))
    }
}

pub fn compute(cfg: &RunConfig, grid: &GridRef, workers: usize) -> LabResult<StrichartzSuite> {
    let fields = corpus(cfg, grid)?;
    let triples: Vec<ResolvedTriple> = cfg.strichartz_triples.iter().map(resolve).collect();
    let jobs: Vec<(usize, usize)> = triples
        .iter()
        .enumerate()
        .filter(|(_, t)| t.gamma.is_ok())
        .flat_map(|(i, _)| (0..fields.len()).map(move |f| (i, f)))
        .collect();
    let ratios = ordered_map(&jobs, workers, |&(i, f)| {
        let t = &triples[i];
        let gamma = *t.gamma.as_ref().expect("only admissible triples are scheduled");
        strichartz_ratio(&fields[f].state, t.p, t.q, gamma, cfg.strichartz_horizon, cfg.dt)
    });
    let mut rows = Vec::with_capacity(jobs.len());
    for (&(triple, field), ratio) in jobs.iter().zip(ratios) {
        rows.push(StrichartzRow { triple, field, ratio: ratio? });
    }
    Ok(StrichartzSuite {
        triples,
        labels: fields.into_iter().map(|f| f.label).collect(),
        rows,
    })
}

pub fn write(suite: &StrichartzSuite, out: &mut OutputDir) -> LabResult<()> {
    let mut csv = out.csv("strichartz.csv", &["p", "q", "gamma", "field", "ratio"])?;
    for r in &suite.rows {
        let t = &suite.triples[r.triple];
        csv.row([
            num(t.p),
            num(t.q),
            num(*t.gamma.as_ref().expect("admissible")),
            suite.labels[r.field].clone(),
            num(r.ratio),
        ])?;
    }
    csv.close()?;

    let mut max = out.csv("strichartz_max.csv", &["p", "q", "gamma", "max_ratio", "min_ratio", "status"])?;
    for (i, t) in suite.triples.iter().enumerate() {
        match &t.gamma {
            Ok(g) => {
                let ratios = suite.ratios(i);
                let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
                let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
                max.row([num(t.p), num(t.q), num(*g), num(hi), num(lo), "ok".to_string()])?;
                println!("strichartz: ({}, {}, {}) max ratio {:.5} min {:.5}", t.p, t.q, g, hi, lo);
                out.record(json!({
                    "record": "strichartz",
                    "p": num(t.p),
                    "q": num(t.q),
                    "gamma": g,
                    "max_ratio": hi,
                    "min_ratio": lo,
                    "fields": suite.labels,
                    "ratios": ratios,
                }));
            }
            Err(reason) => {
                max.row([num(t.p), num(t.q), String::new(), String::new(), String::new(), format!("skipped: {reason}")])?;
                println!("strichartz: ({}, {}) skipped: {reason}", t.p, t.q);
                out.record(json!({
                    "record": "strichartz",
                    "p": num(t.p),
                    "q": num(t.q),
                    "skipped": reason,
                }));
            }
        }
    }
    max.close()?;
    Ok(())
}
