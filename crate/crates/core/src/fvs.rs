//! Distance release for graphs with a small feedback vertex set `S`.
//!
//! The forest `G ∖ S` is released with [`crate::tree::private_tree_apsp`];
//! distances between `S` vertices and weights of the edges between `S` and
//! the forest are released with the Laplace mechanism. Every other distance
//! is assembled by minimising over the ways a shortest path can meet `S`:
//!
//! 1. `u ∉ S`, `v ∈ S`, no other `S` vertex on the path: the last hop enters
//!    `v` from a forest neighbour `p`, so `d̂(u, v) = min_p d̂_F(u, p) + w′(p, v)`.
//! 2. the path visits another `p ∈ S` first: `d̂(u, v) = d̂(u, p) + d̂(p, v)`.
//! 3. `u, v ∉ S` through some `p ∈ S`: `d̂(u, v) = d̂(u, p) + d̂(p, v)`.
//!
//! Each pass keeps the running minimum, so a case covered by an earlier
//! pass is never lost.

use itertools::Itertools;
use rand::RngCore;

use crate::distance::{DistanceMatrix, Release};
use crate::error::{Error, Result};
use crate::graph::{is_forest_without, Graph};
use crate::noise::{alg2_noise_params, Laplace, PrivacyBudget};
use crate::paths::multi_source;
use crate::tree::private_tree_apsp;

/// A feedback vertex set together with the edge partition it induces.
#[derive(Debug, Clone)]
pub struct FvsDecomposition {
    /// Sorted vertex ids.
    pub s: Vec<usize>,
    /// `G ∖ S` on the original ids; `S` vertices are isolated.
    pub forest: Graph,
    /// Edge ids of `G` with exactly one endpoint in `S`.
    pub cross_edges: Vec<usize>,
    /// Edge ids of `G` with both endpoints in `S`.
    pub s_edges: Vec<usize>,
}

impl FvsDecomposition {
    pub fn new(g: &Graph, mut s: Vec<usize>) -> Result<Self> {
        s.sort_unstable();
        s.dedup();
        let mut in_s = vec![false; g.n()];
        for &v in &s {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
            }
            in_s[v] = true;
        }
        if !is_forest_without(g, &in_s) {
            return Err(Error::Cyclic);
        }
        let mut cross_edges = Vec::new();
        let mut s_edges = Vec::new();
        for (id, e) in g.edges().iter().enumerate() {
            match (in_s[e.u], in_s[e.v]) {
                (true, true) => s_edges.push(id),
                (false, false) => {}
                _ => cross_edges.push(id),
            }
        }
        Ok(FvsDecomposition {
            s,
            forest: g.induced_without(&in_s),
            cross_edges,
            s_edges,
        })
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }
}

/// Feedback vertex set by the local-ratio scheme for the vertex feedback set
/// problem with unit weights: strip vertices of degree ≤ 1, lower every
/// residual weight by `γ·(deg − 1)` with `γ` the smallest ratio
/// `w/(deg − 1)`, take a vertex whose weight hit zero, repeat. A final
/// reverse pass drops vertices whose removal from the set keeps it valid.
///
/// Ties go to the smallest vertex id.
pub fn compute_fvs_2approx(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut weight = vec![1.0f64; n];
    let mut picked = Vec::new();

    let remove = |v: usize, alive: &mut Vec<bool>, degree: &mut Vec<usize>, stack: &mut Vec<usize>| {
        alive[v] = false;
        for &(y, _) in g.neighbors(v) {
            if alive[y] {
                degree[y] -= 1;
                if degree[y] <= 1 {
                    stack.push(y);
                }
            }
        }
    };

    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    loop {
        while let Some(v) = stack.pop() {
            if alive[v] {
                remove(v, &mut alive, &mut degree, &mut stack);
            }
        }
        let live: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        if live.is_empty() {
            break;
        }
        let mut best = live[0];
        let mut ratio = f64::INFINITY;
        for &v in &live {
            let r = weight[v] / (degree[v] - 1) as f64;
            if r < ratio {
                ratio = r;
                best = v;
            }
        }
        for &v in &live {
            weight[v] -= ratio * (degree[v] - 1) as f64;
        }
        weight[best] = 0.0;
        picked.push(best);
        remove(best, &mut alive, &mut degree, &mut stack);
    }

    let mut in_s = vec![false; n];
    for &v in &picked {
        in_s[v] = true;
    }
    for &v in picked.iter().rev() {
        in_s[v] = false;
        if !is_forest_without(g, &in_s) {
            in_s[v] = true;
        }
    }
    (0..n).filter(|&v| in_s[v]).collect()
}

/// Minimum feedback vertex set by exhaustive search in increasing size and
/// lexicographic order. Limited to `n ≤ 20`.
pub fn brute_force_min_fvs(g: &Graph) -> Result<Vec<usize>> {
    let n = g.n();
    if n > 20 {
        return Err(Error::param(format!("exhaustive FVS search limited to n <= 20, got {n}")));
    }
    let mut removed = vec![false; n];
    for k in 0..=n {
        for subset in (0..n).combinations(k) {
            for &v in &subset {
                removed[v] = true;
            }
            if is_forest_without(g, &removed) {
                return Ok(subset);
            }
            for &v in &subset {
                removed[v] = false;
            }
        }
    }
    unreachable!("removing every vertex leaves a forest")
}

#[derive(Debug, Clone)]
pub struct FvsRelease {
    pub release: Release,
    pub fvs: Vec<usize>,
    /// `|S|² ≥ n`: the shortcut mechanism has the better error bound here.
    pub shortcut_preferred: bool,
}

/// Intermediate estimates of the combination passes, indexed `[u][i]` for
/// vertex `u` and the `i`-th vertex of `S`.
pub struct Passes {
    pub last_hop: Vec<Vec<f64>>,
    pub via_s: Vec<Vec<f64>>,
    pub distances: DistanceMatrix,
}

/// Runs the three combination passes.
///
/// `forest` holds forest estimates (infinite across trees), `s_pairs[i][j]`
/// the released `S`-pair distances, and `entries[i]` the noisy weights
/// `(p, w′(p, s_i))` of the cross edges at `s_i`.
pub fn combine(
    forest: &DistanceMatrix,
    s: &[usize],
    s_pairs: &[Vec<f64>],
    entries: &[Vec<(usize, f64)>],
) -> Passes {
    let n = forest.n();
    let k = s.len();
    let mut in_s = vec![false; n];
    for &v in s {
        in_s[v] = true;
    }

    let mut last_hop = vec![vec![f64::INFINITY; k]; n];
    for u in (0..n).filter(|&u| !in_s[u]) {
        for (i, list) in entries.iter().enumerate() {
            last_hop[u][i] = list
                .iter()
                .map(|&(p, w)| forest.raw(u, p) + w)
                .fold(f64::INFINITY, f64::min);
        }
    }

    let mut via_s = last_hop.clone();
    for u in (0..n).filter(|&u| !in_s[u]) {
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let d = last_hop[u][j] + s_pairs[j][i];
                if d < via_s[u][i] {
                    via_s[u][i] = d;
                }
            }
        }
    }

    let mut distances = DistanceMatrix::zeros(n);
    for i in 0..k {
        for j in (i + 1)..k {
            distances.set(s[i], s[j], s_pairs[i][j]);
        }
    }
    for u in (0..n).filter(|&u| !in_s[u]) {
        for i in 0..k {
            distances.set(u, s[i], via_s[u][i]);
        }
        for v in ((u + 1)..n).filter(|&v| !in_s[v]) {
            let through = (0..k)
                .map(|i| via_s[u][i] + via_s[v][i])
                .fold(f64::INFINITY, f64::min);
            distances.set(u, v, forest.raw(u, v).min(through));
        }
    }

    Passes {
        last_hop,
        via_s,
        distances,
    }
}

/// Releases all pairwise distances of `g` using a feedback vertex set.
pub fn fvs_private_apsp<R: RngCore>(g: &Graph, budget: &PrivacyBudget, rng: &mut R) -> Result<FvsRelease> {
    let decomposition = FvsDecomposition::new(g, compute_fvs_2approx(g))?;
    fvs_private_apsp_with(g, &decomposition, budget, rng)
}

/// As [`fvs_private_apsp`] with a caller-supplied decomposition.
pub fn fvs_private_apsp_with<R: RngCore>(
    g: &Graph,
    decomposition: &FvsDecomposition,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<FvsRelease> {
    let s = &decomposition.s;
    let k = s.len();
    let params = alg2_noise_params(k, budget);

    let forest = private_tree_apsp(&decomposition.forest, params.epsilon_prime, budget.gamma(), rng)?;

    let mut s_pairs = vec![vec![0.0; k]; k];
    if k >= 2 {
        let pair_noise = Laplace::centered(params.sigma1)?;
        let exact = multi_source(g, s);
        for i in 0..k {
            for j in (i + 1)..k {
                let d = exact[i][s[j]] + pair_noise.sample(rng);
                s_pairs[i][j] = d;
                s_pairs[j][i] = d;
            }
        }
    }

    let mut slot = vec![usize::MAX; g.n()];
    for (i, &v) in s.iter().enumerate() {
        slot[v] = i;
    }
    let edge_noise = Laplace::centered(params.sigma0)?;
    let mut entries = vec![Vec::new(); k];
    for (i, &v) in s.iter().enumerate() {
        for &(p, id) in g.neighbors(v) {
            if slot[p] == usize::MAX {
                entries[i].push((p, g.edge(id).weight + edge_noise.sample(rng)));
            }
        }
    }

    let mut distances = combine(&forest.distances, s, &s_pairs, &entries).distances;
    let clamped_count = distances.clamp_negative() + forest.clamped_count;
    Ok(FvsRelease {
        release: Release {
            distances,
            clamped_count,
        },
        fvs: s.clone(),
        shortcut_preferred: k * k >= g.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_connected_random, gen_random_tree};
    use crate::graph::is_forest;
    use crate::paths::{apsp_exact, single_source};
    use crate::seed::rng_from_seed;

    fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1.0)))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn fvs_of_small_graphs() {
        let tree = gen_random_tree(15, 1.0, 2.0, 1).unwrap();
        assert!(compute_fvs_2approx(&tree).is_empty());
        assert!(brute_force_min_fvs(&tree).unwrap().is_empty());

        assert_eq!(compute_fvs_2approx(&cycle(3)), vec![0]);
        assert_eq!(brute_force_min_fvs(&cycle(3)).unwrap(), vec![0]);

        let k4 = complete(4);
        let approx = compute_fvs_2approx(&k4);
        assert_eq!(brute_force_min_fvs(&k4).unwrap().len(), 2);
        assert!(approx.len() >= 2 && approx.len() <= 4);
        assert!(FvsDecomposition::new(&k4, approx).is_ok());
    }

    #[test]
    fn two_disjoint_triangles() {
        let g = Graph::new(
            6,
            [
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
                (2, 3, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(brute_force_min_fvs(&g).unwrap().len(), 2);
        assert_eq!(compute_fvs_2approx(&g).len(), 2);
    }

    #[test]
    fn brute_force_size_guard() {
        let g = gen_random_tree(21, 1.0, 2.0, 1).unwrap();
        assert!(brute_force_min_fvs(&g).is_err());
    }

    #[test]
    fn decomposition_partitions_edges() {
        let g = gen_connected_random(40, 6, 1.0, 2.0, 3).unwrap();
        let d = FvsDecomposition::new(&g, compute_fvs_2approx(&g)).unwrap();
        assert!(is_forest(&d.forest));
        assert_eq!(d.forest.m() + d.cross_edges.len() + d.s_edges.len(), g.m());
        assert!(FvsDecomposition::new(&cycle(5), vec![]).is_err());
    }

    fn forest_exact(forest: &Graph) -> DistanceMatrix {
        DistanceMatrix::from_rows((0..forest.n()).map(|s| single_source(forest, s).dist).collect())
    }

    #[test]
    fn noiseless_combination_is_exact() {
        for seed in 0..10 {
            let g = gen_connected_random(30, 5, 1.0, 10.0, seed).unwrap();
            let d = FvsDecomposition::new(&g, compute_fvs_2approx(&g)).unwrap();
            let exact = apsp_exact(&g);
            let s = &d.s;
            let s_pairs: Vec<Vec<f64>> = s.iter().map(|&a| s.iter().map(|&b| exact.raw(a, b)).collect()).collect();
            let entries: Vec<Vec<(usize, f64)>> = s
                .iter()
                .map(|&v| {
                    g.neighbors(v)
                        .iter()
                        .filter(|(p, _)| !s.contains(p))
                        .map(|&(p, id)| (p, g.edge(id).weight))
                        .collect()
                })
                .collect();
            let passes = combine(&forest_exact(&d.forest), s, &s_pairs, &entries);
            let err = passes.distances.error_against(&exact).max_abs;
            assert!(err < 1e-9, "seed {seed}: error {err}");
        }
    }

    #[test]
    fn passes_never_increase_estimates() {
        let g = gen_connected_random(40, 8, 1.0, 10.0, 7).unwrap();
        let d = FvsDecomposition::new(&g, compute_fvs_2approx(&g)).unwrap();
        let params = alg2_noise_params(d.k(), &PrivacyBudget::new(0.5, 0.01, 0.01).unwrap());
        let mut rng = rng_from_seed(4);
        let forest = private_tree_apsp(&d.forest, params.epsilon_prime, 0.01, &mut rng).unwrap();
        let noise = Laplace::centered(params.sigma1).unwrap();
        let k = d.k();
        let mut s_pairs = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let x = 20.0 + noise.sample(&mut rng);
                s_pairs[i][j] = x;
                s_pairs[j][i] = x;
            }
        }
        let entries: Vec<Vec<(usize, f64)>> = d
            .s
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter(|(p, _)| !d.s.contains(p))
                    .map(|&(p, _)| (p, noise.sample(&mut rng)))
                    .collect()
            })
            .collect();
        let passes = combine(&forest.distances, &d.s, &s_pairs, &entries);
        for u in 0..g.n() {
            for i in 0..k {
                assert!(passes.via_s[u][i] <= passes.last_hop[u][i]);
            }
            for v in 0..g.n() {
                if !d.s.contains(&u) && !d.s.contains(&v) {
                    assert!(passes.distances.raw(u, v) <= forest.distances.raw(u, v));
                }
            }
        }
    }

    #[test]
    fn tree_input_matches_forest_release() {
        let g = gen_random_tree(60, 1.0, 5.0, 2).unwrap();
        let budget = PrivacyBudget::new(1.0, 0.01, 0.01).unwrap();
        let a = fvs_private_apsp(&g, &budget, &mut rng_from_seed(9)).unwrap();
        let b = private_tree_apsp(&g, 1.0 / 3.0, 0.01, &mut rng_from_seed(9)).unwrap();
        assert!(a.fvs.is_empty());
        assert_eq!(a.release.distances, b.distances);
    }

    #[test]
    fn cycle_vanishing_noise() {
        let g = cycle(5);
        let budget = PrivacyBudget::new(1e6, 0.01, 0.01).unwrap();
        let r = fvs_private_apsp(&g, &budget, &mut rng_from_seed(1)).unwrap();
        let err = r.release.distances.error_against(&apsp_exact(&g)).max_abs;
        assert!(err < 1e-2, "error {err}");
    }

    #[test]
    fn release_shape_and_determinism() {
        let g = gen_connected_random(50, 4, 1.0, 5.0, 8).unwrap();
        let budget = PrivacyBudget::new(2.0, 0.01, 0.01).unwrap();
        let a = fvs_private_apsp(&g, &budget, &mut rng_from_seed(3)).unwrap();
        let b = fvs_private_apsp(&g, &budget, &mut rng_from_seed(3)).unwrap();
        assert_eq!(a.release, b.release);
        assert!(a.release.distances.is_symmetric());
        assert!(a.release.distances.has_zero_diagonal());
        assert!((0..g.n()).all(|u| (0..g.n()).all(|v| a.release.distances.get(u, v).is_some())));
    }
}
