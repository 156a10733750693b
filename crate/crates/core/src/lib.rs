//! Differentially private release of all-pairs shortest-path distances
//! under weight privacy: the topology of a graph is public and two graphs
//! are neighbours when their weight vectors differ by at most 1 in L1.
//!
//! Mechanisms:
//!
//! * [`shortcut`]: publishes a synthetic graph whose sampled shortcut
//!   vertices are joined by noisy exact distances, with shifted Laplace
//!   noise on every weight. Error grows as `√n · log² n`.
//! * [`fvs`]: for graphs with a small feedback vertex set `S`, combines a
//!   private forest release with noisy `S`-pair distances.
//! * [`tree`]: polylog-error release on forests, used by [`fvs`].
//!
//! The naive per-edge and output-perturbation baselines live in
//! [`shortcut::baseline_edge_laplace`] and
//! [`shortcut::baseline_output_perturbation`].

pub mod distance;
pub mod error;
pub mod fvs;
pub mod generators;
pub mod graph;
pub mod noise;
pub mod paths;
pub mod seed;
pub mod shortcut;
pub mod tree;

pub use distance::{DistanceMatrix, Release};
pub use error::{Error, Result};
pub use graph::{is_forest, Graph};
pub use noise::{NoiseParams, PrivacyBudget};
pub use paths::{apsp_exact, canonical_path, shortest_path, Path};
