//! Flat `key = value` run configuration.
//!
//! One entry per line, `#` starts a comment, keys are dotted
//! (`grid.r_max`, `scheme.s0`). Numbers accept `inf`, fractions `a/b` and
//! powers `a^b`; lists are comma separated and Strichartz triples are
//! `p,q[,gamma]` groups separated by `;`.

use std::fmt;
use std::path::Path;

use h3wave::evolve::check_guard;
use h3wave::synth::{DataKind, DataSpec};
use h3wave::truncation::SchemeParams;
use h3wave::{GridRef, RadialGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }

    fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    /// Rewrites a core validation error in terms of the config key it came from.
    pub fn from_core(err: h3wave::Error) -> Self {
        let key = match &err {
            h3wave::Error::InvalidParameter { name, .. } => match *name {
                "r_max" => "grid.r_max",
                "n" => "grid.n",
                "dt" => "time.dt",
                "horizon" | "t_end" => "time.horizon",
                other => other,
            },
            h3wave::Error::GuardViolation { .. } => "time.horizon",
            h3wave::Error::Inadmissible { .. } => "strichartz.triples",
            _ => "config",
        };
        ConfigError::new(key, err.to_string())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Parsed<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorawetzTarget {
    /// The full cubic solution `u`, no source.
    Solution,
    /// `ζ = φ + v` of a truncation run, with source `N = ζ³ - u³`.
    Zeta,
}

/// A requested Strichartz triple; `gamma = None` takes the scaling value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSpec {
    pub p: f64,
    pub q: f64,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub r_max: f64,
    pub n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub data: DataSpec,
    pub scheme: SchemeParams,
    pub sweep_s0: Vec<f64>,
    pub sweep_s: Vec<f64>,
    pub morawetz_probes: usize,
    /// Pointwise tolerance is `morawetz_tolerance · dt² · sup E`.
    pub morawetz_tolerance: f64,
    pub morawetz_target: MorawetzTarget,
    pub scatter_probes: Vec<f64>,
    pub strichartz_triples: Vec<TripleSpec>,
    pub strichartz_horizon: f64,
    /// Truncation scales whose frequency content the bump corpus follows.
    pub strichartz_scales: Vec<f64>,
    /// Bump radius at the first scale; radii shrink like `√s₀`.
    pub strichartz_radius: f64,
    /// Regularities of the power-law members of the corpus.
    pub strichartz_s: Vec<f64>,
    pub strichartz_support: f64,
    /// `c` in `M = c · s₀^{-(3/16)s + 1/8}`.
    pub bootstrap_c: f64,
    /// Write every `stride`-th per-step row (the last row is always written).
    pub output_stride: usize,
}

fn powers_of_two(from: i32, to: i32, step: i32) -> Vec<f64> {
    (from..=to).step_by(step as usize).map(|j| 2f64.powi(-j)).collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            r_max: 40.0,
            n: 4096,
            dt: 5e-3,
            horizon: 16.0,
            data: DataSpec::default(),
            scheme: SchemeParams::default(),
            sweep_s0: powers_of_two(4, 10, 1),
            sweep_s: vec![0.95],
            morawetz_probes: 10,
            morawetz_tolerance: 10.0,
            morawetz_target: MorawetzTarget::Solution,
            scatter_probes: vec![4.0, 8.0, 12.0, 16.0],
            strichartz_triples: vec![
                TripleSpec { p: 4.0, q: 4.0, gamma: Some(0.5) },
                TripleSpec { p: f64::INFINITY, q: 2.0, gamma: Some(0.0) },
                TripleSpec { p: 8.0 / 3.0, q: 8.0, gamma: None },
                TripleSpec { p: 6.0, q: 6.0, gamma: None },
            ],
            strichartz_horizon: 8.0,
            strichartz_scales: powers_of_two(4, 10, 2),
            strichartz_radius: 2.0,
            strichartz_s: vec![0.6, 0.95],
            strichartz_support: 4.0,
            bootstrap_c: 1.0,
            output_stride: 1,
        }
    }
}

pub const KEYS: &[&str] = &[
    "grid.r_max",
    "grid.n",
    "time.dt",
    "time.horizon",
    "data.kind",
    "data.s",
    "data.seed",
    "data.k_min",
    "data.amplitude",
    "data.support",
    "scheme.s0",
    "scheme.epsilon",
    "scheme.t_max",
    "sweep.s0",
    "sweep.s",
    "morawetz.probes",
    "morawetz.tolerance",
    "morawetz.target",
    "scatter.probes",
    "strichartz.triples",
    "strichartz.horizon",
    "strichartz.scales",
    "strichartz.radius",
    "strichartz.s",
    "strichartz.support",
    "bootstrap.c",
    "output.stride",
];

/// Parses `inf`, decimals, `a/b` and `a^b`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    match t {
        "inf" | "+inf" | "infinity" => return Some(f64::INFINITY),
        "" => return None,
        _ => {}
    }
    if let Some((a, b)) = t.split_once('/') {
        return Some(parse_number(a)? / parse_number(b)?);
    }
    if let Some((a, b)) = t.split_once('^') {
        return Some(parse_number(a)?.powf(parse_number(b)?));
    }
    t.parse().ok()
}

fn number(key: &str, value: &str) -> Parsed<f64> {
    parse_number(value).ok_or_else(|| ConfigError::new(key, format!("expected a number, found `{value}`")))
}

fn integer<T: std::str::FromStr>(key: &str, value: &str) -> Parsed<T> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(key, format!("expected a non-negative integer, found `{value}`")))
}

fn list(key: &str, value: &str) -> Parsed<Vec<f64>> {
    value.split(',').map(|v| number(key, v)).collect()
}

fn triples(key: &str, value: &str) -> Parsed<Vec<TripleSpec>> {
    value
        .split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|group| {
            let parts = list(key, group)?;
            match parts[..] {
                [p, q] => Ok(TripleSpec { p, q, gamma: None }),
                [p, q, g] => Ok(TripleSpec { p, q, gamma: Some(g) }),
                _ => Err(ConfigError::new(key, format!("expected `p,q` or `p,q,gamma`, found `{group}`"))),
            }
        })
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Parsed<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Parsed<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::new(content, "expected `key = value`").at(line));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(ConfigError::new(key, "unknown key").at(line));
            };
            if seen.contains(&known) {
                return Err(ConfigError::new(key, "duplicate key").at(line));
            }
            seen.push(known);
            cfg.set(known, value).map_err(|e| e.at(line))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Parsed<()> {
        match key {
            "grid.r_max" => self.r_max = number(key, value)?,
            "grid.n" => self.n = integer(key, value)?,
            "time.dt" => self.dt = number(key, value)?,
            "time.horizon" => self.horizon = number(key, value)?,
            "data.kind" => {
                self.data.kind = match value {
                    "power_law" => DataKind::PowerLaw,
                    "bump" => DataKind::Bump,
                    "single_mode" => DataKind::SingleMode,
                    other => {
                        return Err(ConfigError::new(
                            key,
                            format!("expected power_law, bump or single_mode, found `{other}`"),
                        ))
                    }
                }
            }
            "data.s" => self.data.s = number(key, value)?,
            "data.seed" => self.data.seed = integer(key, value)?,
            "data.k_min" => self.data.k_min = integer(key, value)?,
            "data.amplitude" => self.data.amplitude = number(key, value)?,
            "data.support" => self.data.support = number(key, value)?,
            "scheme.s0" => self.scheme.s0 = number(key, value)?,
            "scheme.epsilon" => self.scheme.epsilon = number(key, value)?,
            "scheme.t_max" => self.scheme.t_max = number(key, value)?,
            "sweep.s0" => self.sweep_s0 = list(key, value)?,
            "sweep.s" => self.sweep_s = list(key, value)?,
            "morawetz.probes" => self.morawetz_probes = integer(key, value)?,
            "morawetz.tolerance" => self.morawetz_tolerance = number(key, value)?,
            "morawetz.target" => {
                self.morawetz_target = match value {
                    "u" => MorawetzTarget::Solution,
                    "zeta" => MorawetzTarget::Zeta,
                    other => return Err(ConfigError::new(key, format!("expected u or zeta, found `{other}`"))),
                }
            }
            "scatter.probes" => self.scatter_probes = list(key, value)?,
            "strichartz.triples" => self.strichartz_triples = triples(key, value)?,
            "strichartz.horizon" => self.strichartz_horizon = number(key, value)?,
            "strichartz.scales" => self.strichartz_scales = list(key, value)?,
            "strichartz.radius" => self.strichartz_radius = number(key, value)?,
            "strichartz.s" => self.strichartz_s = list(key, value)?,
            "strichartz.support" => self.strichartz_support = number(key, value)?,
            "bootstrap.c" => self.bootstrap_c = number(key, value)?,
            "output.stride" => self.output_stride = integer(key, value)?,
            other => return Err(ConfigError::new(other, "unknown key")),
        }
        Ok(())
    }

    /// Checks grid, time step, data and scheme, and returns the grid.
    pub fn validate_base(&self) -> Parsed<GridRef> {
        let grid = RadialGrid::new(self.r_max, self.n).map_err(ConfigError::from_core)?;
        positive("time.dt", self.dt)?;
        positive("time.horizon", self.horizon)?;
        self.data.validate().map_err(ConfigError::from_core)?;
        self.scheme.validate().map_err(ConfigError::from_core)?;
        if self.output_stride == 0 {
            return Err(ConfigError::new("output.stride", "must be at least 1"));
        }
        Ok(grid)
    }

    /// `support + horizon + 1 ≤ r_max` for the configured data.
    pub fn check_guard(&self, grid: &GridRef, horizon: f64) -> Parsed<()> {
        check_guard(grid, self.data.support_radius(grid), horizon).map_err(ConfigError::from_core)
    }

    /// Advisory only: the kick is accurate when `dt ≤ dr/2`.
    pub fn step_warning(&self, grid: &GridRef) -> Option<String> {
        (self.dt > 0.5 * grid.dr()).then(|| {
            format!(
                "warning: time.dt = {} exceeds dr/2 = {}; kick accuracy may degrade",
                self.dt,
                0.5 * grid.dr()
            )
        })
    }

    pub fn validate_sweep(&self) -> Parsed<()> {
        let key = "sweep.s0";
        if self.sweep_s0.len() < 4 {
            return Err(ConfigError::new(key, "a sweep needs at least 4 points"));
        }
        for &s0 in &self.sweep_s0 {
            positive(key, s0)?;
        }
        let lo = self.sweep_s0.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.sweep_s0.iter().cloned().fold(0.0, f64::max);
        if (hi / lo).log2() < 3.0 - 1e-12 {
            return Err(ConfigError::new(key, "sweep points must span at least 3 octaves"));
        }
        if self.sweep_s.is_empty() {
            return Err(ConfigError::new("sweep.s", "at least one regularity is required"));
        }
        for &s in &self.sweep_s {
            if !(s > 0.0 && s <= 1.0) {
                return Err(ConfigError::new("sweep.s", format!("regularity {s} is outside (0, 1]")));
            }
        }
        positive("bootstrap.c", self.bootstrap_c)
    }

    pub fn validate_scatter(&self, grid: &GridRef) -> Parsed<()> {
        let mut last = 0.0;
        for &p in &self.scatter_probes {
            if !(p > last && p.is_finite()) {
                return Err(ConfigError::new("scatter.probes", "probe times must be positive and increasing"));
            }
            last = p;
        }
        if self.scatter_probes.len() < 2 {
            return Err(ConfigError::new("scatter.probes", "at least two probes are required"));
        }
        check_guard(grid, self.data.support_radius(grid), last)
            .map_err(|e| ConfigError::new("scatter.probes", e.to_string()))
    }

    pub fn validate_strichartz(&self, grid: &GridRef) -> Parsed<()> {
        positive("strichartz.horizon", self.strichartz_horizon)?;
        positive("strichartz.radius", self.strichartz_radius)?;
        positive("strichartz.support", self.strichartz_support)?;
        if self.strichartz_triples.is_empty() {
            return Err(ConfigError::new("strichartz.triples", "at least one triple is required"));
        }
        for &s0 in &self.strichartz_scales {
            positive("strichartz.scales", s0)?;
        }
        for &s in &self.strichartz_s {
            if !(s > 0.0 && s <= 1.0) {
                return Err(ConfigError::new("strichartz.s", format!("regularity {s} is outside (0, 1]")));
            }
        }
        let widest = self.strichartz_radius_for_scales().into_iter().fold(self.strichartz_support, f64::max);
        check_guard(grid, widest, self.strichartz_horizon)
            .map_err(|e| ConfigError::new("strichartz.horizon", e.to_string()))
    }

    pub fn strichartz_radius_for_scales(&self) -> Vec<f64> {
        let base = self.strichartz_scales.first().copied().unwrap_or(1.0);
        self.strichartz_scales.iter().map(|s0| self.strichartz_radius * (s0 / base).sqrt()).collect()
    }

    pub fn validate_morawetz(&self) -> Parsed<()> {
        positive("morawetz.tolerance", self.morawetz_tolerance)
    }
}

fn positive(key: &str, v: f64) -> Parsed<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("must be positive and finite, found {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_comments_and_lists() {
        let cfg = RunConfig::parse(
            "# reference run\n\
             grid.n = 1024   # coarse\n\
             scheme.s0 = 2^-6\n\
             scheme.epsilon = inf\n\
             sweep.s0 = 1/16, 1/32, 2^-7, 2^-8\n\
             strichartz.triples = 4,4,0.5; inf,2\n\
             data.kind = bump\n",
        )
        .unwrap();
        assert_eq!(cfg.n, 1024);
        assert_eq!(cfg.scheme.s0, 1.0 / 64.0);
        assert!(cfg.scheme.epsilon.is_infinite());
        assert_eq!(cfg.sweep_s0, vec![0.0625, 0.03125, 2f64.powi(-7), 2f64.powi(-8)]);
        assert_eq!(cfg.strichartz_triples[1].gamma, None);
        assert!(cfg.strichartz_triples[1].p.is_infinite());
        assert_eq!(cfg.data.kind, DataKind::Bump);
        assert_eq!(cfg.r_max, 40.0);
    }

    #[test]
    fn errors_name_key_and_line() {
        let e = RunConfig::parse("grid.n = 64\ngrid.bogus = 1\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("grid.bogus", Some(2)));
        let e = RunConfig::parse("time.dt = fast").unwrap_err();
        assert_eq!(e.key, "time.dt");
        let e = RunConfig::parse("grid.n = 64\ngrid.n = 128").unwrap_err();
        assert!(e.message.contains("duplicate"));
        assert!(RunConfig::parse("no equals sign").is_err());
        assert!(RunConfig::parse("strichartz.triples = 4").is_err());
    }

    #[test]
    fn validation() {
        let cfg = RunConfig::default();
        let g = cfg.validate_base().unwrap();
        cfg.check_guard(&g, cfg.horizon).unwrap();
        cfg.validate_sweep().unwrap();
        cfg.validate_scatter(&g).unwrap();
        cfg.validate_strichartz(&g).unwrap();

        let far = RunConfig { horizon: 40.0, ..RunConfig::default() };
        let e = far.check_guard(&g, far.horizon).unwrap_err();
        assert_eq!(e.key, "time.horizon");

        let e = RunConfig { n: 1, ..RunConfig::default() }.validate_base().unwrap_err();
        assert_eq!(e.key, "grid.n");
        let mut bad = RunConfig::default();
        bad.data.s = 1.5;
        assert_eq!(bad.validate_base().unwrap_err().key, "data.s");

        let narrow = RunConfig { sweep_s0: vec![0.1, 0.09, 0.08, 0.07], ..RunConfig::default() };
        assert!(narrow.validate_sweep().unwrap_err().message.contains("octaves"));
        let short = RunConfig { sweep_s0: vec![1.0, 0.01], ..RunConfig::default() };
        assert!(short.validate_sweep().is_err());
    }

    #[test]
    fn step_warning_only_above_half_dr() {
        let cfg = RunConfig { n: 1024, ..RunConfig::default() };
        let g = cfg.validate_base().unwrap();
        assert!(cfg.step_warning(&g).is_none());
        let coarse = RunConfig { dt: 0.1, ..cfg };
        assert!(coarse.step_warning(&g).is_some());
    }
}
