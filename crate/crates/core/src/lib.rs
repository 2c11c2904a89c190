//! Volume entropy of finite metric graphs and the Basmajian-type
//! inequalities satisfied by chord graphs (a circle with `2n` marked points
//! joined in pairs by `n` extra edges).
//!
//! The main entry points are [`lim::volume_entropy`], which solves the
//! non-backtracking transfer system, and [`basmajian::graph_bounds`], which
//! evaluates the `tanh < 2 Σ 1/(1+e^{hℓ}) < sinh` double inequality. The
//! closed forms in [`closed_forms`] and the covering-tree counts in
//! [`oracle`] provide independent cross-checks.

pub mod basmajian;
pub mod chord;
pub mod cli;
pub mod closed_forms;
pub mod error;
pub mod graph;
pub mod lim;
pub mod numeric;
pub mod oracle;
pub mod remark;
pub mod rng;
pub mod survey;

pub use error::{Error, Result};
pub use graph::{betti, build_graph, prune_leaves, GraphSpec, MetricGraph};
pub use lim::{volume_entropy, EntropyOptions, EntropyResult};
