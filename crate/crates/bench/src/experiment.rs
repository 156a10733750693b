//! Runs mechanisms over a grid of graph sizes, budgets and repetitions.

use std::time::Instant;

use anyhow::{Context, Result};
use dpapsp_core::fvs::fvs_private_apsp;
use dpapsp_core::generators::{gen_connected_random, gen_multi_stage, gen_random_tree};
use dpapsp_core::seed::{derive_seed, rng_from_seed};
use dpapsp_core::shortcut::{
    answer_all_pairs, baseline_edge_laplace, baseline_output_perturbation, release_synthetic_graph,
};
use dpapsp_core::{apsp_exact, DistanceMatrix, Graph, PrivacyBudget, Release};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Family, Mechanism};

const GRAPH_STREAM: u64 = 0;

/// One mechanism run on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub mechanism: Mechanism,
    pub n: usize,
    pub epsilon: f64,
    pub rep: usize,
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    pub runtime_ms: f64,
    pub clamped_count: usize,
}

/// Records for one weight range.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub weight_range: (f64, f64),
    pub records: Vec<ErrorRecord>,
}

/// Output of one mechanism, with the notes the runner may want to log.
pub struct MechanismOutput {
    pub release: Release,
    pub shortcut_preferred: bool,
}

/// Dispatches to the release mechanism.
pub fn run_mechanism(
    mechanism: Mechanism,
    g: &Graph,
    budget: &PrivacyBudget,
    seed: u64,
) -> Result<MechanismOutput> {
    let mut rng = rng_from_seed(seed);
    let mut shortcut_preferred = false;
    let release = match mechanism {
        Mechanism::Alg1 => {
            let sg = release_synthetic_graph(g, budget, &mut rng)?;
            Release {
                distances: answer_all_pairs(&sg),
                clamped_count: sg.clamped_count,
            }
        }
        Mechanism::Alg2 => {
            let out = fvs_private_apsp(g, budget, &mut rng)?;
            shortcut_preferred = out.shortcut_preferred;
            out.release
        }
        Mechanism::EdgeBaseline => baseline_edge_laplace(g, budget.epsilon(), &mut rng)?,
        Mechanism::OutputBaseline => baseline_output_perturbation(g, budget, &mut rng)?,
    };
    Ok(MechanismOutput {
        release,
        shortcut_preferred,
    })
}

/// Builds the input graph of the configured family for target size `n`.
/// Multi-stage graphs have `10·s + 1` vertices with `s = round((n − 1)/10)`.
pub fn generate(family: Family, n: usize, weight_range: (f64, f64), seed: u64) -> Result<Graph> {
    let (lo, hi) = weight_range;
    let g = match family {
        Family::MultiStage => {
            let stages = ((n.saturating_sub(1) as f64) / 10.0).round().max(1.0) as usize;
            gen_multi_stage(stages, lo, hi, seed)?
        }
        Family::RandomTree => gen_random_tree(n, lo, hi, seed)?,
        Family::ConnectedRandom { extra_edges } => gen_connected_random(n, extra_edges, lo, hi, seed)?,
    };
    Ok(g)
}

/// Seed of the input graph for (panel, size, repetition).
pub fn graph_seed(master: u64, panel: usize, size_idx: usize, rep: usize) -> u64 {
    derive_seed(master, &[panel as u64, size_idx as u64, rep as u64, GRAPH_STREAM])
}

/// Seed of one mechanism run on that graph.
pub fn mechanism_seed(
    master: u64,
    panel: usize,
    size_idx: usize,
    rep: usize,
    mechanism: Mechanism,
    eps_idx: usize,
) -> u64 {
    derive_seed(
        master,
        &[panel as u64, size_idx as u64, rep as u64, mechanism.code(), eps_idx as u64],
    )
}

/// Runs every weight range of the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<Panel>> {
    cfg.validate()?;
    (0..cfg.weight_ranges.len())
        .map(|p| {
            Ok(Panel {
                weight_range: cfg.weight_ranges[p],
                records: run_panel(cfg, p)?,
            })
        })
        .collect()
}

/// Runs one weight range. Records are sorted by size, mechanism (in
/// configuration order), budget and repetition.
pub fn run_panel(cfg: &ExperimentConfig, panel: usize) -> Result<Vec<ErrorRecord>> {
    let range = cfg.weight_ranges[panel];
    let budgets: Vec<PrivacyBudget> = cfg
        .epsilons
        .iter()
        .map(|&eps| PrivacyBudget::new(eps, cfg.delta, cfg.gamma))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.sizes.len())
        .flat_map(|s| (0..cfg.repetitions).map(move |r| (s, r)))
        .collect();
    info!(
        "panel {}:{}: {} graphs, {} runs each",
        range.0,
        range.1,
        jobs.len(),
        cfg.mechanisms.len() * budgets.len()
    );

    let per_graph: Vec<Vec<(usize, usize, ErrorRecord)>> = jobs
        .par_iter()
        .map(|&(size_idx, rep)| {
            let seed = graph_seed(cfg.master_seed, panel, size_idx, rep);
            let g = generate(cfg.family, cfg.sizes[size_idx], range, seed)
                .with_context(|| format!("generating size {} rep {rep}", cfg.sizes[size_idx]))?;
            let exact = apsp_exact(&g);
            let mut out = Vec::new();
            for (m_idx, &mechanism) in cfg.mechanisms.iter().enumerate() {
                for (e_idx, budget) in budgets.iter().enumerate() {
                    let seed = mechanism_seed(cfg.master_seed, panel, size_idx, rep, mechanism, e_idx);
                    let record = measure(mechanism, &g, &exact, budget, seed, rep, cfg.timing)?;
                    out.push((m_idx, e_idx, record));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut keyed: Vec<(usize, usize, ErrorRecord)> = per_graph.into_iter().flatten().collect();
    keyed.sort_by(|a, b| {
        (a.2.n, a.0, a.1, a.2.rep).cmp(&(b.2.n, b.0, b.1, b.2.rep))
    });
    Ok(keyed.into_iter().map(|(_, _, r)| r).collect())
}

fn measure(
    mechanism: Mechanism,
    g: &Graph,
    exact: &DistanceMatrix,
    budget: &PrivacyBudget,
    seed: u64,
    rep: usize,
    timing: bool,
) -> Result<ErrorRecord> {
    let start = Instant::now();
    let out = run_mechanism(mechanism, g, budget, seed)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    if out.shortcut_preferred {
        warn!(
            "{mechanism} at n = {}: feedback vertex set has k² ≥ n, alg1 has the better bound",
            g.n()
        );
    }
    let stats = out.release.distances.error_against(exact);
    Ok(ErrorRecord {
        mechanism,
        n: g.n(),
        epsilon: budget.epsilon(),
        rep,
        max_abs_error: stats.max_abs,
        mean_abs_error: stats.mean_abs,
        runtime_ms: if timing { elapsed } else { 0.0 },
        clamped_count: out.release.clamped_count,
    })
}

/// Mean over repetitions of the max error, per size, for one series.
/// Sizes come back ascending.
pub fn mean_max_error(records: &[ErrorRecord], mechanism: Mechanism, epsilon: f64) -> Vec<(usize, f64)> {
    let mut sums: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for r in records
        .iter()
        .filter(|r| r.mechanism == mechanism && r.epsilon == epsilon)
    {
        let e = sums.entry(r.n).or_insert((0.0, 0));
        e.0 += r.max_abs_error;
        e.1 += 1;
    }
    sums.into_iter().map(|(n, (s, c))| (n, s / c as f64)).collect()
}

/// Distinct `(mechanism, ε)` series in first-appearance order.
pub fn series(records: &[ErrorRecord]) -> Vec<(Mechanism, f64)> {
    let mut out: Vec<(Mechanism, f64)> = Vec::new();
    for r in records {
        if !out.iter().any(|&(m, e)| m == r.mechanism && e == r.epsilon) {
            out.push((r.mechanism, r.epsilon));
        }
    }
    out
}
