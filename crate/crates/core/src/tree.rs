//! Pure ε-DP all-pairs distances on forests with polylogarithmic error.
//!
//! Each tree is rooted at its smallest vertex and split recursively at
//! centroids. A subproblem is a component `C` of the not-yet-removed
//! vertices together with an anchor `a` such that every root-to-`x` path for
//! `x ∈ C` passes through `a`. Splitting releases one noisy record, the
//! distance `a → c` to the centroid `c`; the component containing `a`'s
//! attachment keeps anchor `a`, every other component is anchored at `c`.
//!
//! Components at least halve per level, so there are at most
//! `⌊log₂ n⌋ + 1` levels, and within a level the record paths are
//! edge-disjoint. Each edge therefore appears in at most `L ≤ ⌈log₂ n⌉ + 1`
//! records, and perturbing every record with `Lap(L/ε)` is ε-DP. A noisy
//! root distance is the sum of the records along a vertex's anchor chain, and
//! `d̂(u, v) = r̂(u) + r̂(v) − 2·r̂(lca(u, v))` with the LCA taken from the
//! public topology.

use std::collections::VecDeque;

use rand::RngCore;

use crate::distance::{DistanceMatrix, Release};
use crate::error::{Error, Result};
use crate::graph::{is_forest, Graph};
use crate::noise::Laplace;

/// One released path sum: anchor to centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub anchor: usize,
    pub centroid: usize,
    pub level: usize,
    /// Edge ids along the path.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    n: usize,
    roots: Vec<usize>,
    component: Vec<usize>,
    segments: Vec<Segment>,
    /// Segment ending at each vertex; `None` for component roots.
    vertex_segment: Vec<Option<usize>>,
    participation: Vec<u32>,
    levels: usize,
}

/// A record as published: segment endpoints and the noisy sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub anchor: usize,
    pub centroid: usize,
    pub noisy_sum: f64,
}

#[derive(Debug, Clone)]
pub struct ReleasedTree {
    pub records: Vec<Record>,
    /// Noisy distance from each vertex's component root.
    pub root_distance: Vec<f64>,
    pub noise_scale: f64,
}

impl TreeDecomposition {
    pub fn build(forest: &Graph) -> Result<Self> {
        if !is_forest(forest) {
            return Err(Error::Cyclic);
        }
        let n = forest.n();
        let (count, component) = forest.components();
        let mut roots = vec![usize::MAX; count];
        for v in (0..n).rev() {
            roots[component[v]] = v;
        }

        let mut removed = vec![false; n];
        let mut segments = Vec::new();
        let mut vertex_segment = vec![None; n];
        let mut participation = vec![0u32; forest.m()];
        let mut levels = 0;

        let mut bfs_order = Vec::new();
        let mut bfs_parent = vec![usize::MAX; n];
        let mut subtree = vec![0usize; n];
        let mut path_pred: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX); n];

        let mut tasks: VecDeque<(usize, usize, usize)> = roots.iter().map(|&r| (r, r, 0)).collect();
        while let Some((anchor, start, level)) = tasks.pop_front() {
            levels = levels.max(level + 1);

            // component of `start` among live vertices
            bfs_order.clear();
            bfs_order.push(start);
            bfs_parent[start] = usize::MAX;
            let mut head = 0;
            while head < bfs_order.len() {
                let x = bfs_order[head];
                head += 1;
                for &(y, _) in forest.neighbors(x) {
                    if !removed[y] && y != bfs_parent[x] {
                        bfs_parent[y] = x;
                        bfs_order.push(y);
                    }
                }
            }
            let total = bfs_order.len();
            for &x in bfs_order.iter().rev() {
                subtree[x] = 1 + forest
                    .neighbors(x)
                    .iter()
                    .filter(|&&(y, _)| !removed[y] && bfs_parent[y] == x)
                    .map(|&(y, _)| subtree[y])
                    .sum::<usize>();
            }
            let centroid = *bfs_order
                .iter()
                .find(|&&x| {
                    let largest_child = forest
                        .neighbors(x)
                        .iter()
                        .filter(|&&(y, _)| !removed[y] && bfs_parent[y] == x)
                        .map(|&(y, _)| subtree[y])
                        .max()
                        .unwrap_or(0);
                    2 * largest_child.max(total - subtree[x]) <= total
                })
                .expect("every tree has a centroid");

            // path centroid -> anchor through live vertices
            let mut toward_anchor = None;
            if centroid != anchor {
                let mut queue = VecDeque::from([centroid]);
                path_pred[centroid] = (centroid, usize::MAX);
                let mut visited = vec![centroid];
                while let Some(x) = queue.pop_front() {
                    if x == anchor {
                        break;
                    }
                    for &(y, id) in forest.neighbors(x) {
                        if (!removed[y] || y == anchor) && path_pred[y].0 == usize::MAX {
                            path_pred[y] = (x, id);
                            visited.push(y);
                            queue.push_back(y);
                        }
                    }
                }
                let mut edges = Vec::new();
                let mut x = anchor;
                while x != centroid {
                    let (prev, id) = path_pred[x];
                    edges.push(id);
                    if prev == centroid && !removed[x] {
                        toward_anchor = Some(x);
                    }
                    x = prev;
                }
                for v in visited {
                    path_pred[v] = (usize::MAX, usize::MAX);
                }
                edges.reverse();
                for &id in &edges {
                    participation[id] += 1;
                }
                vertex_segment[centroid] = Some(segments.len());
                segments.push(Segment {
                    anchor,
                    centroid,
                    level,
                    edges,
                });
            }

            removed[centroid] = true;
            for &(x, _) in forest.neighbors(centroid) {
                if !removed[x] {
                    let next_anchor = if Some(x) == toward_anchor { anchor } else { centroid };
                    tasks.push_back((next_anchor, x, level + 1));
                }
            }
        }

        Ok(TreeDecomposition {
            n,
            roots,
            component,
            segments,
            vertex_segment,
            participation,
            levels,
        })
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Number of released records containing each edge.
    pub fn participation(&self) -> &[u32] {
        &self.participation
    }

    pub fn max_participation(&self) -> u32 {
        self.participation.iter().copied().max().unwrap_or(0)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `⌈log₂ n⌉ + 1`, the bound on participation and on anchor chains.
    pub fn participation_bound(&self) -> u32 {
        let n = self.n.max(1);
        (usize::BITS - (n - 1).leading_zeros()) + 1
    }

    /// Records whose sum gives the root distance of `v`, root first.
    pub fn chain(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = v;
        while let Some(s) = self.vertex_segment[x] {
            out.push(s);
            x = self.segments[s].anchor;
        }
        out.reverse();
        out
    }

    /// Releases every record with `Lap(L/ε)` noise, `L` the maximum edge
    /// participation.
    pub fn release<R: RngCore>(&self, forest: &Graph, epsilon: f64, rng: &mut R) -> Result<ReleasedTree> {
        if !(epsilon > 0.0) {
            return Err(Error::param(format!("epsilon must be > 0, got {epsilon}")));
        }
        let scale = f64::from(self.max_participation().max(1)) / epsilon;
        let noise = Laplace::centered(scale)?;
        Ok(self.assemble(forest, scale, |rng| noise.sample(rng), rng))
    }

    #[cfg(test)]
    pub(crate) fn release_noiseless(&self, forest: &Graph) -> ReleasedTree {
        self.assemble(forest, 0.0, |_| 0.0, &mut crate::seed::rng_from_seed(0))
    }

    fn assemble<R: RngCore>(
        &self,
        forest: &Graph,
        scale: f64,
        mut draw: impl FnMut(&mut R) -> f64,
        rng: &mut R,
    ) -> ReleasedTree {
        let records: Vec<Record> = self
            .segments
            .iter()
            .map(|s| {
                let sum: f64 = s.edges.iter().map(|&id| forest.edge(id).weight).sum();
                Record {
                    anchor: s.anchor,
                    centroid: s.centroid,
                    noisy_sum: sum + draw(rng),
                }
            })
            .collect();
        // anchors precede their centroids in segment order
        let mut root_distance = vec![0.0; self.n];
        for r in &records {
            root_distance[r.centroid] = root_distance[r.anchor] + r.noisy_sum;
        }
        ReleasedTree {
            records,
            root_distance,
            noise_scale: scale,
        }
    }

    fn distances(&self, forest: &Graph, released: &ReleasedTree) -> DistanceMatrix {
        let lca = Lca::new(forest, &self.roots);
        let r = &released.root_distance;
        let mut out = DistanceMatrix::unreachable(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.component[u] == self.component[v] {
                    let a = lca.query(u, v);
                    out.set(u, v, r[u] + r[v] - 2.0 * r[a]);
                }
            }
        }
        out
    }
}

/// Lowest common ancestors by binary lifting on a rooted forest.
pub struct Lca {
    up: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl Lca {
    pub fn new(forest: &Graph, roots: &[usize]) -> Self {
        let n = forest.n();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut queue = VecDeque::new();
        for &r in roots {
            parent[r] = r;
            queue.push_back(r);
        }
        while let Some(x) = queue.pop_front() {
            for &(y, _) in forest.neighbors(x) {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        let log = (usize::BITS - n.leading_zeros()).max(1) as usize;
        let mut up = vec![parent];
        for k in 1..log {
            let prev = &up[k - 1];
            let next = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        Lca { up, depth }
    }

    pub fn query(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                u = self.up[k][u];
            }
            diff >>= 1;
            k += 1;
        }
        if u == v {
            return u;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][u] != self.up[k][v] {
                u = self.up[k][u];
                v = self.up[k][v];
            }
        }
        self.up[0][u]
    }
}

/// ε-DP release of all pairwise distances on a forest. Pairs in different
/// trees come back unreachable. `gamma` is the utility failure probability
/// the error bound refers to; it does not change the noise.
pub fn private_tree_apsp<R: RngCore>(t: &Graph, epsilon: f64, gamma: f64, rng: &mut R) -> Result<Release> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(format!("gamma must be in (0,1), got {gamma}")));
    }
    let decomposition = TreeDecomposition::build(t)?;
    let released = decomposition.release(t, epsilon, rng)?;
    let mut distances = decomposition.distances(t, &released);
    let clamped_count = distances.clamp_negative();
    Ok(Release {
        distances,
        clamped_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_random_tree;
    use crate::paths::apsp_exact;
    use crate::seed::rng_from_seed;

    fn path_graph(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0 + i as f64 * 0.25))).unwrap()
    }

    fn star(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (0, i, i as f64))).unwrap()
    }

    fn noiseless(forest: &Graph) -> DistanceMatrix {
        let d = TreeDecomposition::build(forest).unwrap();
        d.distances(forest, &d.release_noiseless(forest))
    }

    fn forest_exact(forest: &Graph) -> DistanceMatrix {
        // per-source search on the forest; unreachable stays infinite
        let rows = (0..forest.n())
            .map(|s| crate::paths::single_source(forest, s).dist)
            .collect();
        DistanceMatrix::from_rows(rows)
    }

    #[test]
    fn rejects_cycles() {
        let tri = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(matches!(TreeDecomposition::build(&tri), Err(Error::Cyclic)));
        assert!(private_tree_apsp(&tri, 1.0, 0.1, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn noiseless_release_is_exact() {
        for g in [path_graph(2), path_graph(37), star(20), gen_random_tree(300, 0.0, 10.0, 9).unwrap()] {
            let exact = apsp_exact(&g);
            let err = noiseless(&g).error_against(&exact).max_abs;
            assert!(err <= 1e-9 * exact.raw(0, g.n() - 1).max(1.0), "error {err}");
        }
    }

    #[test]
    fn noiseless_forest_with_unreachable_pairs() {
        let f = Graph::new_unconnected(7, [(0, 1, 1.0), (1, 2, 2.0), (4, 5, 3.0), (5, 6, 1.0)]).unwrap();
        let d = noiseless(&f);
        assert_eq!(d.get(0, 2), Some(3.0));
        assert_eq!(d.get(4, 6), Some(4.0));
        assert_eq!(d.get(0, 4), None);
        assert_eq!(d.get(3, 3), Some(0.0));
        assert_eq!(d.get(3, 0), None);
        assert_eq!(d.error_against(&forest_exact(&f)).max_abs, 0.0);
    }

    #[test]
    fn participation_and_chain_bounds() {
        for n in [1, 2, 3, 64, 255, 256, 257, 1000] {
            for g in [path_graph(n.max(2)), gen_random_tree(n, 0.0, 1.0, n as u64).unwrap()] {
                let d = TreeDecomposition::build(&g).unwrap();
                let bound = d.participation_bound();
                assert!(d.max_participation() <= bound, "n={n}");
                assert!(d.levels() as u32 <= bound);
                for v in 0..g.n() {
                    assert!(d.chain(v).len() as u32 <= bound);
                }
            }
        }
    }

    #[test]
    fn participation_counts_match_segments() {
        let g = gen_random_tree(200, 0.0, 1.0, 4).unwrap();
        let d = TreeDecomposition::build(&g).unwrap();
        let mut count = vec![0u32; g.m()];
        for s in d.segments() {
            for &e in &s.edges {
                count[e] += 1;
            }
        }
        assert_eq!(count, d.participation());
    }

    #[test]
    fn noise_scale_is_participation_over_epsilon() {
        let g = gen_random_tree(128, 0.0, 1.0, 4).unwrap();
        let d = TreeDecomposition::build(&g).unwrap();
        let r = d.release(&g, 0.5, &mut rng_from_seed(1)).unwrap();
        assert_eq!(r.noise_scale, f64::from(d.max_participation()) / 0.5);
        assert_eq!(r.records.len(), d.segments().len());
    }

    #[test]
    fn self_distance_is_exactly_zero() {
        let g = gen_random_tree(100, 0.0, 1.0, 4).unwrap();
        let r = private_tree_apsp(&g, 0.1, 0.01, &mut rng_from_seed(3)).unwrap();
        assert!(r.distances.has_zero_diagonal());
        assert!(r.distances.is_symmetric());
    }

    #[test]
    fn lca_on_path_and_star() {
        let p = path_graph(10);
        let lca = Lca::new(&p, &[0]);
        assert_eq!(lca.query(3, 7), 3);
        assert_eq!(lca.query(9, 9), 9);
        let s = star(6);
        let lca = Lca::new(&s, &[0]);
        assert_eq!(lca.query(2, 5), 0);
    }
}
