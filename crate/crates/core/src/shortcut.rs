//! Synthetic-graph release with sampled shortcut vertices.
//!
//! About `√n` vertices are sampled into a shortcut set `V₁`. Every pair in
//! `V₁` is joined by an edge carrying its exact distance plus shifted
//! Laplace noise `Lap(μ₁, σ₁)`; every remaining original edge gets
//! `Lap(μ₀, σ₀)`. Both shifts make the noise nonnegative with high
//! probability, so shortest paths in the published graph never undercut the
//! truth, while long paths can hop through one shortcut and pay only one
//! large noise term.
//!
//! The two naive baselines (per-edge centred noise, and noise on the output
//! matrix) are here as well for comparison.

use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use rand::RngCore;

use crate::distance::{DistanceMatrix, Release};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::noise::{alg1_noise_params, compose_advanced, Laplace, NoiseParams, PrivacyBudget};
use crate::paths::{apsp_exact, multi_source};

/// The published graph `G′ = (V, E₀ ∪ E₁, w′)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticGraph {
    /// Noisy weights. Original edges not joining two shortcut vertices come
    /// first, in input order, followed by the shortcut edges.
    pub base: Graph,
    /// Sorted shortcut vertex ids.
    pub shortcut_vertices: Vec<usize>,
    /// Edge ids in `base` of the shortcut edges.
    pub shortcut_edges: Vec<usize>,
    pub clamped_count: usize,
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

/// `⌈√n⌉` distinct vertices chosen uniformly without replacement, sorted.
pub fn sample_shortcut_vertices<R: RngCore>(g: &Graph, rng: &mut R) -> Result<Vec<usize>> {
    let n = g.n();
    if n < 4 {
        return Err(Error::param(format!("shortcut release needs n >= 4, got {n}")));
    }
    let mut picked = rand::seq::index::sample(rng, n, ceil_sqrt(n)).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// `G′` with true weights: original edges keep `w`, shortcut edges carry the
/// exact distance. Edge order matches [`SyntheticGraph::base`]. Canonical
/// paths are defined on this graph.
pub fn augmented_topology(g: &Graph, shortcut_vertices: &[usize]) -> Result<Graph> {
    let mut member = vec![false; g.n()];
    for &v in shortcut_vertices {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
        member[v] = true;
    }
    let exact = multi_source(g, shortcut_vertices);
    let mut edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .filter(|e| !(member[e.u] && member[e.v]))
        .map(|e| (e.u, e.v, e.weight))
        .collect();
    for (i, &p) in shortcut_vertices.iter().enumerate() {
        for &q in &shortcut_vertices[i + 1..] {
            edges.push((p, q, exact[i][q]));
        }
    }
    Graph::new(g.n(), edges)
}

/// Builds and noises the synthetic graph.
pub fn release_synthetic_graph<R: RngCore>(
    g: &Graph,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<SyntheticGraph> {
    let shortcut_vertices = sample_shortcut_vertices(g, rng)?;
    let params = alg1_noise_params(g.n(), budget);
    let truth = augmented_topology(g, &shortcut_vertices)?;
    let k = shortcut_vertices.len();
    let first_shortcut = truth.m() - k * (k - 1) / 2;

    let shortcut_noise = Laplace::new(params.mu1, params.sigma1)?;
    let edge_noise = Laplace::new(params.mu0, params.sigma0)?;
    let mut weights: Vec<f64> = truth.edges().iter().map(|e| e.weight).collect();
    // shortcut edges draw first, then the original edges
    for w in &mut weights[first_shortcut..] {
        *w += shortcut_noise.sample(rng);
    }
    for w in &mut weights[..first_shortcut] {
        *w += edge_noise.sample(rng);
    }
    let mut clamped_count = 0;
    for w in &mut weights {
        if *w < 0.0 {
            *w = 0.0;
            clamped_count += 1;
        }
    }

    Ok(SyntheticGraph {
        base: truth.with_weights(&weights)?,
        shortcut_vertices,
        shortcut_edges: (first_shortcut..truth.m()).collect(),
        clamped_count,
    })
}

/// Noise parameters used by [`release_synthetic_graph`] for this graph.
pub fn release_params(g: &Graph, budget: &PrivacyBudget) -> NoiseParams {
    alg1_noise_params(g.n(), budget)
}

/// The released distances: exact APSP over the noisy weights.
pub fn answer_all_pairs(sg: &SyntheticGraph) -> DistanceMatrix {
    apsp_exact(&sg.base)
}

impl SyntheticGraph {
    pub fn sidecar_path(path: &FsPath) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".meta");
        PathBuf::from(s)
    }

    /// Sidecar header: the shortcut vertex ids and the clamp count.
    pub fn sidecar(&self) -> String {
        let mut out = String::from("shortcut_vertices");
        for v in &self.shortcut_vertices {
            let _ = write!(out, " {v}");
        }
        let _ = writeln!(out, "\nclamped_count {}", self.clamped_count);
        out
    }

    /// Writes the edge list to `path` and the sidecar to `path.meta`.
    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        self.base.save(path)?;
        let side = Self::sidecar_path(path);
        std::fs::write(&side, self.sidecar()).map_err(|source| Error::Io { path: side, source })
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let base = Graph::load(path)?;
        let side = Self::sidecar_path(path);
        let text = std::fs::read_to_string(&side).map_err(|source| Error::Io {
            path: side.clone(),
            source,
        })?;
        Self::from_parts(base, &text)
    }

    fn from_parts(base: Graph, sidecar: &str) -> Result<Self> {
        let mut shortcut_vertices = None;
        let mut clamped_count = None;
        for (i, line) in sidecar.lines().enumerate() {
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("shortcut_vertices") => {
                    let ids = fields
                        .map(|f| f.parse::<usize>().map_err(|_| bad("bad vertex id")))
                        .collect::<Result<Vec<_>>>()?;
                    shortcut_vertices = Some(ids);
                }
                Some("clamped_count") => {
                    let c = fields
                        .next()
                        .and_then(|f| f.parse().ok())
                        .ok_or_else(|| bad("bad clamped_count"))?;
                    clamped_count = Some(c);
                }
                None => {}
                Some(_) => return Err(bad("unknown sidecar key")),
            }
        }
        let missing = |k: &str| Error::Parse {
            line: 0,
            msg: format!("sidecar lacks {k}"),
        };
        let shortcut_vertices = shortcut_vertices.ok_or_else(|| missing("shortcut_vertices"))?;
        let clamped_count = clamped_count.ok_or_else(|| missing("clamped_count"))?;
        let mut member = vec![false; base.n()];
        for &v in &shortcut_vertices {
            if v >= base.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: base.n() });
            }
            member[v] = true;
        }
        let shortcut_edges = (0..base.m())
            .filter(|&id| {
                let e = base.edge(id);
                member[e.u] && member[e.v]
            })
            .collect();
        Ok(SyntheticGraph {
            base,
            shortcut_vertices,
            shortcut_edges,
            clamped_count,
        })
    }
}

/// Per-edge centred noise `Lap(0, 1/ε)`, negatives clamped to zero, then
/// exact APSP on the noisy graph.
pub fn baseline_edge_laplace<R: RngCore>(g: &Graph, epsilon: f64, rng: &mut R) -> Result<Release> {
    let noise = Laplace::centered(1.0 / epsilon)?;
    let mut clamped_count = 0;
    let weights: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| {
            let w = e.weight + noise.sample(rng);
            if w < 0.0 {
                clamped_count += 1;
                0.0
            } else {
                w
            }
        })
        .collect();
    Ok(Release {
        distances: apsp_exact(&g.with_weights(&weights)?),
        clamped_count,
    })
}

/// Scale of the per-pair noise in [`baseline_output_perturbation`]: each of
/// the `K = n(n−1)/2` sensitivity-1 pair queries gets its share of the
/// budget under advanced composition.
pub fn output_perturbation_scale(n: usize, budget: &PrivacyBudget) -> f64 {
    let pairs = n * (n - 1) / 2;
    1.0 / compose_advanced(budget.epsilon(), pairs, budget.delta())
}

/// Exact APSP plus centred Laplace noise on every distinct pair.
pub fn baseline_output_perturbation<R: RngCore>(
    g: &Graph,
    budget: &PrivacyBudget,
    rng: &mut R,
) -> Result<Release> {
    let n = g.n();
    if n < 2 {
        return Err(Error::param("output perturbation needs n >= 2"));
    }
    let noise = Laplace::centered(output_perturbation_scale(n, budget))?;
    let mut distances = apsp_exact(g);
    for u in 0..n {
        for v in (u + 1)..n {
            let d = distances.raw(u, v) + noise.sample(rng);
            distances.set(u, v, d);
        }
    }
    let clamped_count = distances.clamp_negative();
    Ok(Release {
        distances,
        clamped_count,
    })
}
