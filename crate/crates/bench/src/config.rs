//! Experiment configuration.
//!
//! The file format is flat `key = value` lines; list values are comma
//! separated, `#` starts a comment. Keys:
//!
//! | key            | value                                                    |
//! |----------------|----------------------------------------------------------|
//! | `preset`       | `ci` or `full`; fills every other key, must come first |
//! | `family`       | `multi_stage`, `random_tree` or `connected_random`       |
//! | `extra_edges`  | chords added to the tree (`connected_random` only)       |
//! | `weight_ranges`| `low:high` pairs, one output panel per range             |
//! | `sizes`        | target vertex counts                                     |
//! | `mechanisms`   | subset of `alg1, alg2, edge_baseline, output_baseline`   |
//! | `epsilons`     | privacy budgets to sweep                                 |
//! | `delta`        | δ of `(ε, δ)`                                            |
//! | `gamma`        | utility failure probability                              |
//! | `repetitions`  | runs per grid point                                      |
//! | `master_seed`  | root of all derived seeds                                |
//! | `output_dir`   | where CSV, SVG and data files go                         |
//! | `timing`       | `true` to record mechanism wall time                     |
//!
//! With `timing = false` (the default) `runtime_ms` is written as zero and
//! the CSV is a pure function of the configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use dpapsp_core::PrivacyBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mechanism {
    Alg1,
    Alg2,
    EdgeBaseline,
    OutputBaseline,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [
        Mechanism::Alg1,
        Mechanism::Alg2,
        Mechanism::EdgeBaseline,
        Mechanism::OutputBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Alg1 => "alg1",
            Mechanism::Alg2 => "alg2",
            Mechanism::EdgeBaseline => "edge_baseline",
            Mechanism::OutputBaseline => "output_baseline",
        }
    }

    pub(crate) fn code(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .with_context(|| format!("unknown mechanism `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    MultiStage,
    RandomTree,
    ConnectedRandom { extra_edges: usize },
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::MultiStage => "multi_stage",
            Family::RandomTree => "random_tree",
            Family::ConnectedRandom { .. } => "connected_random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: Family,
    pub weight_ranges: Vec<(f64, f64)>,
    pub sizes: Vec<usize>,
    pub mechanisms: Vec<Mechanism>,
    pub epsilons: Vec<f64>,
    pub delta: f64,
    pub gamma: f64,
    pub repetitions: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::preset("ci").unwrap()
    }
}

impl ExperimentConfig {
    /// `ci`: 50 repetitions up to n ≈ 500. `full`: both weight ranges,
    /// 200 repetitions, n ≈ 100..1000.
    pub fn preset(name: &str) -> Result<Self> {
        let base = ExperimentConfig {
            family: Family::MultiStage,
            weight_ranges: vec![(2000.0, 3000.0)],
            sizes: vec![101, 201, 301, 401, 501],
            mechanisms: vec![Mechanism::Alg1, Mechanism::EdgeBaseline],
            epsilons: vec![1.0, 2.0],
            delta: 0.01,
            gamma: 0.01,
            repetitions: 50,
            master_seed: 1,
            output_dir: PathBuf::from("results"),
            timing: false,
        };
        match name {
            "ci" => Ok(base),
            "full" => Ok(ExperimentConfig {
                weight_ranges: vec![(2000.0, 3000.0), (1e4, 1e5)],
                sizes: (1..=10).map(|i| 100 * i + 1).collect(),
                mechanisms: vec![Mechanism::Alg1],
                epsilons: vec![0.5, 1.0, 2.0],
                repetitions: 200,
                ..base
            }),
            other => bail!("unknown preset `{other}`"),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut extra_edges: Option<usize> = None;
        let mut family_name: Option<String> = None;
        let mut seen_other = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected `key = value`", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let ctx = || format!("line {}: bad value for `{key}`", i + 1);
            match key {
                "preset" => {
                    if seen_other {
                        bail!("line {}: `preset` must precede other keys", i + 1);
                    }
                    cfg = ExperimentConfig::preset(value)?;
                    continue;
                }
                "family" => family_name = Some(value.to_string()),
                "extra_edges" => extra_edges = Some(value.parse().with_context(ctx)?),
                "weight_ranges" => cfg.weight_ranges = parse_list(value, parse_range).with_context(ctx)?,
                "sizes" => cfg.sizes = parse_list(value, |s| Ok(s.parse()?)).with_context(ctx)?,
                "mechanisms" => cfg.mechanisms = parse_list(value, |s| s.parse()).with_context(ctx)?,
                "epsilons" => cfg.epsilons = parse_list(value, |s| Ok(s.parse()?)).with_context(ctx)?,
                "delta" => cfg.delta = value.parse().with_context(ctx)?,
                "gamma" => cfg.gamma = value.parse().with_context(ctx)?,
                "repetitions" => cfg.repetitions = value.parse().with_context(ctx)?,
                "master_seed" => cfg.master_seed = value.parse().with_context(ctx)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "timing" => cfg.timing = value.parse().with_context(ctx)?,
                other => bail!("line {}: unknown key `{other}`", i + 1),
            }
            seen_other = true;
        }
        if let Some(name) = family_name {
            cfg.family = match name.as_str() {
                "multi_stage" => Family::MultiStage,
                "random_tree" => Family::RandomTree,
                "connected_random" => Family::ConnectedRandom {
                    extra_edges: extra_edges.unwrap_or(0),
                },
                other => bail!("unknown family `{other}`"),
            };
        } else if extra_edges.is_some() {
            bail!("`extra_edges` requires `family = connected_random`");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            bail!("repetitions must be >= 1");
        }
        if self.sizes.is_empty() || self.epsilons.is_empty() || self.mechanisms.is_empty() {
            bail!("sizes, epsilons and mechanisms must be non-empty");
        }
        if self.weight_ranges.is_empty() {
            bail!("weight_ranges must be non-empty");
        }
        for &(lo, hi) in &self.weight_ranges {
            if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
                bail!("weight range {lo}:{hi} must satisfy 0 <= low < high");
            }
        }
        for &eps in &self.epsilons {
            PrivacyBudget::new(eps, self.delta, self.gamma)?;
        }
        for &n in &self.sizes {
            let min = match self.family {
                Family::MultiStage => 11,
                Family::RandomTree => 2,
                Family::ConnectedRandom { .. } => 2,
            };
            if n < min {
                bail!("size {n} below the {min}-vertex minimum of {}", self.family.name());
            }
            if self.mechanisms.contains(&Mechanism::Alg1) && n < 4 {
                bail!("alg1 needs n >= 4");
            }
        }
        Ok(())
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').context("expected `low:high`")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}
