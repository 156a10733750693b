//! Seeded graph families for experiments and tests. All generators are
//! pure functions of their arguments.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed::{rng_from_seed, Rng};

fn check_bounds(low: f64, high: f64) -> Result<()> {
    if !(low >= 0.0 && low < high && high.is_finite()) {
        return Err(Error::param(format!(
            "weight bounds must satisfy 0 <= low < high, got [{low}, {high}]"
        )));
    }
    Ok(())
}

fn uniform(rng: &mut Rng, low: f64, high: f64) -> f64 {
    low + (high - low) * rng.gen::<f64>()
}

/// Number of vertices of a multi-stage graph with `stages` stages.
pub fn multi_stage_vertices(stages: usize) -> usize {
    10 * stages + 1
}

/// Chain of `stages` stages. Stage `i` has boundary vertices `10i` and
/// `10(i+1)`, shared with its neighbours, and nine middle vertices
/// `10i+1 ..= 10i+9`, each joined to both boundaries. Every shortest path
/// between the two ends of the chain has `2·stages` edges.
pub fn gen_multi_stage(stages: usize, weight_low: f64, weight_high: f64, seed: u64) -> Result<Graph> {
    if stages == 0 {
        return Err(Error::param("multi-stage graph needs at least one stage"));
    }
    check_bounds(weight_low, weight_high)?;
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::with_capacity(18 * stages);
    for s in 0..stages {
        let start = 10 * s;
        let end = start + 10;
        for mid in start + 1..end {
            edges.push((start, mid, uniform(&mut rng, weight_low, weight_high)));
            edges.push((mid, end, uniform(&mut rng, weight_low, weight_high)));
        }
    }
    Graph::new(multi_stage_vertices(stages), edges)
}

/// Random recursive tree: vertex `i ≥ 1` attaches to a uniform vertex
/// among `0..i`.
pub fn gen_random_tree(n: usize, weight_low: f64, weight_high: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("tree needs at least one vertex"));
    }
    check_bounds(weight_low, weight_high)?;
    let mut rng = rng_from_seed(seed);
    let edges = random_tree_edges(n, weight_low, weight_high, &mut rng);
    Graph::new(n, edges)
}

fn random_tree_edges(n: usize, low: f64, high: f64, rng: &mut Rng) -> Vec<(usize, usize, f64)> {
    (1..n)
        .map(|i| {
            let parent = rng.gen_range(0..i);
            (parent, i, uniform(rng, low, high))
        })
        .collect()
}

/// A random tree plus `extra_edges` distinct chords chosen uniformly among
/// the non-edges. The endpoints of the chords form a feedback vertex set.
pub fn gen_connected_random(
    n: usize,
    extra_edges: usize,
    weight_low: f64,
    weight_high: f64,
    seed: u64,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("connected random graph needs n >= 2"));
    }
    check_bounds(weight_low, weight_high)?;
    let capacity = n * (n - 1) / 2 - (n - 1);
    if extra_edges > capacity {
        return Err(Error::param(format!(
            "{extra_edges} extra edges exceed the {capacity} available on {n} vertices"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges = random_tree_edges(n, weight_low, weight_high, &mut rng);
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();

    let chords: Vec<(usize, usize)> = if 2 * extra_edges > capacity {
        let mut free: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|p| !present.contains(p))
            .collect();
        free.partial_shuffle(&mut rng, extra_edges);
        free.truncate(extra_edges);
        free
    } else {
        let mut out = Vec::with_capacity(extra_edges);
        while out.len() < extra_edges {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let pair = (a.min(b), a.max(b));
            if a != b && present.insert(pair) {
                out.push(pair);
            }
        }
        out
    };
    for (u, v) in chords {
        edges.push((u, v, uniform(&mut rng, weight_low, weight_high)));
    }
    Graph::new(n, edges)
}
