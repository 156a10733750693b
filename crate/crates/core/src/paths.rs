//! Exact shortest paths: single-source label-setting search, all-pairs
//! distances, and canonical shortest paths with respect to a shortcut set.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A simple path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of edges on the path.
    pub fn link_length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Total weight under `g`'s weights. Fails if a consecutive pair is not
    /// an edge of `g`.
    pub fn weight(&self, g: &Graph) -> Result<f64> {
        self.vertices
            .windows(2)
            .map(|w| g.weight(w[0], w[1]).ok_or(Error::MissingShortcut(w[0], w[1])))
            .sum()
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path tree from one source.
pub struct SearchTree {
    pub dist: Vec<f64>,
    /// `usize::MAX` for the source and unreachable vertices.
    pub pred: Vec<usize>,
}

/// Dijkstra from `source`. Among equal-weight predecessors the smallest
/// vertex id wins, so the resulting paths are deterministic.
pub fn single_source(g: &Graph, source: usize) -> SearchTree {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        vertex: source,
    });
    while let Some(Entry { dist: d, vertex: x }) = heap.pop() {
        if settled[x] || d > dist[x] {
            continue;
        }
        settled[x] = true;
        for &(y, id) in g.neighbors(x) {
            if settled[y] {
                continue;
            }
            let nd = d + g.edge(id).weight;
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = x;
                heap.push(Entry { dist: nd, vertex: y });
            } else if nd == dist[y] && x < pred[y] {
                pred[y] = x;
            }
        }
    }
    SearchTree { dist, pred }
}

/// Exact all-pairs distances, one search per source.
pub fn apsp_exact(g: &Graph) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = (0..g.n())
        .into_par_iter()
        .map(|s| single_source(g, s).dist)
        .collect();
    DistanceMatrix::from_rows(rows)
}

/// Distances from each listed source to every vertex.
pub fn multi_source(g: &Graph, sources: &[usize]) -> Vec<Vec<f64>> {
    sources
        .par_iter()
        .map(|&s| single_source(g, s).dist)
        .collect()
}

/// A shortest `u`–`v` path, or `None` if `v` is unreachable from `u`.
pub(crate) fn try_shortest_path(g: &Graph, u: usize, v: usize) -> Option<Path> {
    // Search from v so that following predecessors walks u -> v.
    let tree = single_source(g, v);
    if !tree.dist[u].is_finite() {
        return None;
    }
    let mut vertices = vec![u];
    let mut x = u;
    while x != v {
        x = tree.pred[x];
        vertices.push(x);
    }
    Some(Path::new(vertices))
}

/// A shortest `u`–`v` path in a connected graph. `u == v` yields `[u]`.
pub fn shortest_path(g: &Graph, u: usize, v: usize) -> Path {
    try_shortest_path(g, u, v).expect("graph is connected")
}

/// Canonical shortest path with respect to `shortcut_set`.
///
/// `g` must already contain an edge between every pair of `shortcut_set`
/// vertices. If the shortest path meets at most one shortcut vertex it is
/// returned as is; otherwise the segment between the shortcut vertices
/// closest to `u` and to `v` is replaced by the single shortcut edge.
pub fn canonical_path(g: &Graph, shortcut_set: &[usize], u: usize, v: usize) -> Result<Path> {
    let mut member = vec![false; g.n()];
    for &x in shortcut_set {
        if x >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: x, n: g.n() });
        }
        member[x] = true;
    }
    let path = try_shortest_path(g, u, v)
        .ok_or_else(|| Error::param(format!("{v} unreachable from {u}")))?;
    let verts = path.vertices();
    let first = verts.iter().position(|&x| member[x]);
    let last = verts.iter().rposition(|&x| member[x]);
    match (first, last) {
        (Some(i), Some(j)) if i < j => {
            let (p, q) = (verts[i], verts[j]);
            if g.edge_id(p, q).is_none() {
                return Err(Error::MissingShortcut(p, q));
            }
            let mut out = verts[..=i].to_vec();
            out.extend_from_slice(&verts[j..]);
            Ok(Path::new(out))
        }
        _ => Ok(path),
    }
}
