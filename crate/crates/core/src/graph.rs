//! Undirected weighted graphs with public topology.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path as FsPath;

use crate::error::{Error, Result};

/// An undirected edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Immutable undirected graph on vertices `0..n` with nonnegative weights.
///
/// Edges keep their insertion order; every consumer that draws noise per
/// edge iterates in this order, which is what makes releases reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    // (neighbour, edge id), sorted by neighbour within each vertex
    adjacency: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl Graph {
    /// Builds a connected graph. Rejects self-loops, duplicate edges,
    /// negative or non-finite weights, and disconnected inputs.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let g = Self::new_unconnected(n, edges)?;
        let (components, _) = g.components();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    /// Same validation as [`Graph::new`] minus the connectivity check. Used
    /// for induced subgraphs and forests.
    pub fn new_unconnected<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::param("graph must have at least one vertex"));
        }
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for (a, b, weight) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight { u, v, weight });
            }
            if index.insert((u, v), list.len()).is_some() {
                return Err(Error::DuplicateEdge(u, v));
            }
            list.push(Edge { u, v, weight });
        }

        let mut degree = vec![0usize; n];
        for e in &list {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0, 0); offsets[n]];
        for (id, e) in list.iter().enumerate() {
            adjacency[fill[e.u]] = (e.v, id);
            fill[e.u] += 1;
            adjacency[fill[e.v]] = (e.u, id);
            fill[e.v] += 1;
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }

        Ok(Graph {
            n,
            edges: list,
            offsets,
            adjacency,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbour, edge id)` pairs in increasing neighbour order.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.index.get(&key).copied()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.edge_id(u, v).map(|id| self.edges[id].weight)
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of connected components and a component label per vertex.
    /// Labels are assigned in order of each component's smallest vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in self.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    pub fn is_connected(&self) -> bool {
        self.components().0 == 1
    }

    /// The subgraph induced by vertices not flagged in `removed`. Vertex ids
    /// are preserved; removed vertices remain as isolated vertices.
    pub fn induced_without(&self, removed: &[bool]) -> Graph {
        assert_eq!(removed.len(), self.n);
        let kept = self
            .edges
            .iter()
            .filter(|e| !removed[e.u] && !removed[e.v])
            .map(|e| (e.u, e.v, e.weight));
        Graph::new_unconnected(self.n, kept).expect("subgraph of a valid graph is valid")
    }

    /// Same topology and edge order with new weights.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Graph> {
        if weights.len() != self.m() {
            return Err(Error::param(format!(
                "expected {} weights, got {}",
                self.m(),
                weights.len()
            )));
        }
        let edges = self
            .edges
            .iter()
            .zip(weights)
            .map(|(e, &w)| (e.u, e.v, w));
        if self.is_connected() {
            Graph::new(self.n, edges)
        } else {
            Graph::new_unconnected(self.n, edges)
        }
    }

    /// Parses the edge-list text format: a header line `n m` followed by
    /// `m` lines `u v w`. Blank lines and lines starting with `#` are
    /// skipped. The graph must be connected.
    pub fn read_edge_list<R: Read>(reader: R) -> Result<Graph> {
        let reader = BufReader::new(reader);
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(bad("expected header `n m`"));
                    }
                    let n = fields[0].parse().map_err(|_| bad("bad vertex count"))?;
                    let m = fields[1].parse().map_err(|_| bad("bad edge count"))?;
                    header = Some((n, m));
                }
                Some(_) => {
                    if fields.len() != 3 {
                        return Err(bad("expected `u v w`"));
                    }
                    let u: usize = fields[0].parse().map_err(|_| bad("bad vertex id"))?;
                    let v: usize = fields[1].parse().map_err(|_| bad("bad vertex id"))?;
                    let w: f64 = fields[2].parse().map_err(|_| bad("bad weight"))?;
                    edges.push((u, v, w));
                }
            }
        }
        let (n, m) = header.ok_or(Error::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        if edges.len() != m {
            return Err(Error::Parse {
                line: 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, edges)
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Graph> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Graph::read_edge_list(file)
    }

    /// Renders the edge-list format. Weights use the shortest decimal that
    /// parses back to the same `f64`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.weight);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_list()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Disjoint-set forest with path halving and union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// True iff the graph has no cycle. Accepts disconnected graphs.
pub fn is_forest(g: &Graph) -> bool {
    let mut uf = UnionFind::new(g.n());
    g.edges().iter().all(|e| uf.union(e.u, e.v))
}

/// True iff removing the flagged vertices leaves a forest.
pub(crate) fn is_forest_without(g: &Graph, removed: &[bool]) -> bool {
    let mut uf = UnionFind::new(g.n());
    g.edges()
        .iter()
        .filter(|e| !removed[e.u] && !removed[e.v])
        .all(|e| uf.union(e.u, e.v))
}
