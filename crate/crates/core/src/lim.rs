//! Volume entropy through the non-backtracking transfer system.
//!
//! For a metric graph and `h >= 0`, the transfer matrix `M(h)` is indexed by
//! darts with `M(h)[d][d'] = exp(-h * length(d'))` whenever `d'` leaves the
//! head of `d` and is not the reversal of `d`. The volume entropy is the
//! unique `h > 0` where the system `x = M(h) x` has a positive solution,
//! equivalently where the Perron root of `M(h)` equals one.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::graph::{betti, prune_leaves_with_report, MetricGraph};
use crate::numeric::{perron_robust, PerronPair};

pub const DEFAULT_TOL_H: f64 = 1e-12;
pub const DEFAULT_RHO_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Sparse nonnegative dart-indexed matrix stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    h: f64,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl TransferMatrix {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.row_start.len() - 1
    }

    pub fn row(&self, d: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[d]..self.row_start[d + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn entry(&self, d: usize, d2: usize) -> f64 {
        self.row(d)
            .filter(|&(c, _)| c == d2)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn row_sum(&self, d: usize) -> f64 {
        self.row(d).map(|(_, v)| v).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut dense = vec![vec![0.0; n]; n];
        for (d, row) in dense.iter_mut().enumerate() {
            for (c, v) in self.row(d) {
                row[c] += v;
            }
        }
        dense
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (d, o) in out.iter_mut().enumerate() {
            *o = self.row(d).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Strongly connected components of the support that carry at least one
    /// internal entry. Darts outside them contribute nothing to the radius.
    fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut support = DiGraph::<(), ()>::with_capacity(n, self.cols.len());
        let nodes: Vec<_> = (0..n).map(|_| support.add_node(())).collect();
        for d in 0..n {
            for (c, v) in self.row(d) {
                if v > 0.0 {
                    support.add_edge(nodes[d], nodes[c], ());
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = tarjan_scc(&support)
            .into_iter()
            .map(|scc| {
                let mut class: Vec<usize> = scc.into_iter().map(|n| n.index()).collect();
                class.sort_unstable();
                class
            })
            .filter(|class| {
                class.len() > 1 || self.row(class[0]).any(|(c, v)| c == class[0] && v > 0.0)
            })
            .collect();
        classes.sort();
        classes
    }

    fn class_perron(&self, class: &[usize], tol: f64, max_iter: usize) -> Result<PerronPair> {
        let mut local = vec![usize::MAX; self.dim()];
        for (i, &d) in class.iter().enumerate() {
            local[d] = i;
        }
        perron_robust(
            class.len(),
            |x, y| {
                for (i, &d) in class.iter().enumerate() {
                    y[i] = self
                        .row(d)
                        .filter(|&(c, _)| local[c] != usize::MAX)
                        .map(|(c, v)| v * x[local[c]])
                        .sum();
                }
            },
            || {
                let mut dense = vec![vec![0.0; class.len()]; class.len()];
                for (i, &d) in class.iter().enumerate() {
                    for (c, v) in self.row(d).filter(|&(c, _)| local[c] != usize::MAX) {
                        dense[i][local[c]] += v;
                    }
                }
                dense
            },
            tol,
            max_iter,
        )
    }
}

pub fn transfer_matrix(g: &MetricGraph, h: f64) -> TransferMatrix {
    let weights: Vec<f64> = g.darts().iter().map(|d| (-h * d.length).exp()).collect();
    let mut row_start = Vec::with_capacity(g.darts().len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_start.push(0);
    for d in 0..g.darts().len() {
        for s in g.successors(d) {
            cols.push(s);
            vals.push(weights[s]);
        }
        row_start.push(cols.len());
    }
    TransferMatrix {
        h,
        row_start,
        cols,
        vals,
    }
}

/// Perron root by shifted power iteration, run separately on each recurrent
/// class so reducible matrices are handled exactly.
pub fn spectral_radius_with_cap(m: &TransferMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    let mut rho = 0.0f64;
    for class in m.recurrent_classes() {
        rho = rho.max(m.class_perron(&class, tol, max_iter)?.rho);
    }
    Ok(rho)
}

pub fn spectral_radius(m: &TransferMatrix, tol: f64) -> Result<f64> {
    spectral_radius_with_cap(m, tol, DEFAULT_MAX_ITER)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    pub tol_h: f64,
    pub rho_tol: f64,
    pub max_iter: usize,
    pub auto_prune: bool,
    /// Allowed `|rho(M(h)) - 1|` when extracting the positive solution.
    pub at_entropy_tol: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            tol_h: DEFAULT_TOL_H,
            rho_tol: DEFAULT_RHO_TOL,
            max_iter: DEFAULT_MAX_ITER,
            auto_prune: true,
            at_entropy_tol: 1e-8,
        }
    }
}

impl EntropyOptions {
    pub fn with_tol(tol_h: f64) -> Self {
        Self {
            tol_h,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub h: f64,
    /// `||x - M(h) x||_inf` for the returned vector (max entry 1).
    pub residual: f64,
    /// Indexed by the darts of `core`.
    pub perron_vector: Vec<f64>,
    /// Final bisection interval; `None` when the entropy is zero.
    pub bracket: Option<(f64, f64)>,
    pub core: MetricGraph,
    pub removed_vertices: Vec<usize>,
    /// Original edge index of each edge of `core`.
    pub core_edges: Vec<usize>,
}

pub fn volume_entropy(g: &MetricGraph, tol_h: f64) -> Result<EntropyResult> {
    volume_entropy_with(g, &EntropyOptions::with_tol(tol_h))
}

pub fn volume_entropy_with(g: &MetricGraph, opts: &EntropyOptions) -> Result<EntropyResult> {
    let (core, removed_vertices, core_edges) = if opts.auto_prune {
        let p = prune_leaves_with_report(g);
        (p.graph, p.removed_vertices, p.kept_edges)
    } else {
        let leaves = g.leaf_count();
        if leaves > 0 {
            return Err(Error::NotPruned { leaves });
        }
        (g.clone(), Vec::new(), (0..g.edge_count()).collect())
    };

    let zero = |core: MetricGraph| EntropyResult {
        h: 0.0,
        residual: 0.0,
        perron_vector: Vec::new(),
        bracket: None,
        core,
        removed_vertices: removed_vertices.clone(),
        core_edges: core_edges.clone(),
    };

    // Every component of a pruned graph is a cycle (radius 1 at h = 0,
    // below 1 for h > 0) or has Betti number >= 2.
    let rho = |h: f64| spectral_radius_with_cap(&transfer_matrix(&core, h), opts.rho_tol, opts.max_iter);
    if betti(&core) <= 1 || rho(0.0)? <= 1.0 + opts.rho_tol {
        return Ok(zero(core));
    }

    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while rho(hi)? >= 1.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::NoConvergence { iterations: doublings });
        }
    }
    while hi - lo > opts.tol_h {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    let solution = positive_solution_with(&core, h, opts)?;
    Ok(EntropyResult {
        h,
        residual: solution.residual,
        perron_vector: solution.vector,
        bracket: Some((lo, hi)),
        core,
        removed_vertices,
        core_edges,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSolution {
    pub vector: Vec<f64>,
    pub rho: f64,
    pub residual: f64,
}

/// Perron vector of `M(h)`, normalized to max entry 1.
///
/// On a connected core the vector is positive on every dart. On a
/// disconnected core only the recurrent classes whose radius is 1 carry
/// nonzero entries.
pub fn positive_solution(g: &MetricGraph, h: f64) -> Result<Vec<f64>> {
    Ok(positive_solution_with(g, h, &EntropyOptions::default())?.vector)
}

pub fn positive_solution_with(
    g: &MetricGraph,
    h: f64,
    opts: &EntropyOptions,
) -> Result<PositiveSolution> {
    let m = transfer_matrix(g, h);
    let mut vector = vec![0.0; m.dim()];
    let mut rho = 0.0f64;
    let mut pairs = Vec::new();
    for class in m.recurrent_classes() {
        let pair = m.class_perron(&class, opts.rho_tol, opts.max_iter)?;
        rho = rho.max(pair.rho);
        pairs.push((class, pair));
    }
    if (rho - 1.0).abs() > opts.at_entropy_tol {
        return Err(Error::NotAtEntropy { h, rho });
    }
    for (class, pair) in pairs {
        if (pair.rho - rho).abs() <= opts.at_entropy_tol {
            for (&d, &v) in class.iter().zip(&pair.vector) {
                vector[d] = v;
            }
        }
    }
    let norm = vector.iter().copied().fold(0.0, f64::max);
    if norm > 0.0 {
        vector.iter_mut().for_each(|v| *v /= norm);
    }
    let mut mx = vec![0.0; m.dim()];
    m.apply(&vector, &mut mx);
    let residual = vector
        .iter()
        .zip(&mx)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PositiveSolution {
        vector,
        rho,
        residual,
    })
}
