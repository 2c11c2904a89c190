//! Brute-force entropy estimates from the universal covering tree.
//!
//! The tree is never built. A tree edge is a non-backtracking dart sequence
//! starting at the base vertex; the traversal carries `(dart, distance to
//! its tail)` and stops once the distance reaches the largest radius. Tree
//! vertices lying over the base vertex are exactly the reduced closed
//! loops, so counting them counts homotopy classes of based loops.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::numeric::CompensatedSum;

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

/// Ball volumes and class counts at increasing radii around one lift of
/// the base vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BallGrowth {
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone)]
struct Partial {
    volumes: Vec<CompensatedSum>,
    counts: Vec<u64>,
}

impl Partial {
    fn new(k: usize) -> Self {
        Self {
            volumes: vec![CompensatedSum::new(); k],
            counts: vec![0; k],
        }
    }

    fn visit(&mut self, radii: &[f64], start: f64, length: f64, closes: bool) {
        let end = start + length;
        for (j, &r) in radii.iter().enumerate() {
            if r > start {
                self.volumes[j].add(length.min(r - start));
                if closes && end <= r {
                    self.counts[j] += 1;
                }
            }
        }
    }

    fn merge(&mut self, other: &Partial) {
        for (a, b) in self.volumes.iter_mut().zip(&other.volumes) {
            a.merge(b);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

struct Walk<'a> {
    g: &'a MetricGraph,
    base: usize,
    radii: &'a [f64],
    reach: f64,
    cap: u64,
    visited: &'a AtomicU64,
}

impl Walk<'_> {
    fn tick(&self) -> Result<()> {
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.cap {
            return Err(Error::BudgetExceeded { cap: self.cap });
        }
        Ok(())
    }

    /// Records tree edge `(dart, start)` and returns the distance at its far
    /// end when the walk continues past it.
    fn step(&self, acc: &mut Partial, dart: usize, start: f64) -> Result<Option<f64>> {
        self.tick()?;
        let d = self.g.dart(dart);
        acc.visit(self.radii, start, d.length, d.head == self.base);
        let end = start + d.length;
        Ok((end < self.reach).then_some(end))
    }

    fn subtree(&self, root: (usize, f64)) -> Result<Partial> {
        let mut acc = Partial::new(self.radii.len());
        let mut stack = vec![root];
        while let Some((dart, start)) = stack.pop() {
            if let Some(end) = self.step(&mut acc, dart, start)? {
                stack.extend(self.g.successors(dart).map(|s| (s, end)));
            }
        }
        Ok(acc)
    }
}

/// Volumes and counts for all `radii` in a single traversal.
///
/// The first few tree levels are expanded serially; the remaining subtrees
/// are summed in parallel and merged in a fixed order, so the result does
/// not depend on scheduling.
pub fn ball_growth(g: &MetricGraph, base: usize, radii: &[f64], cap: u64) -> Result<BallGrowth> {
    if base >= g.vertex_count() {
        return Err(Error::InvalidArgument(format!("base vertex {base} out of range")));
    }
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("radii must be nondecreasing".into()));
    }
    let visited = AtomicU64::new(0);
    let walk = Walk {
        g,
        base,
        radii,
        reach: *radii.last().unwrap(),
        cap,
        visited: &visited,
    };

    let mut head = Partial::new(radii.len());
    let mut frontier: Vec<(usize, f64)> = g.out_darts(base).iter().map(|&d| (d, 0.0)).collect();
    while !frontier.is_empty() && frontier.len() < 256 {
        let mut next = Vec::new();
        for (dart, start) in frontier {
            if let Some(end) = walk.step(&mut head, dart, start)? {
                next.extend(g.successors(dart).map(|s| (s, end)));
            }
        }
        frontier = next;
    }
    let parts: Vec<Partial> = frontier
        .par_iter()
        .map(|&root| walk.subtree(root))
        .collect::<Result<_>>()?;
    for p in &parts {
        head.merge(p);
    }
    Ok(BallGrowth {
        radii: radii.to_vec(),
        volumes: head.volumes.iter().map(CompensatedSum::value).collect(),
        counts: head.counts.iter().map(|c| c + 1).collect(),
    })
}

/// Total length of the radius-`r` ball around a lift of `base`.
pub fn ball_volume(g: &MetricGraph, base: usize, r: f64) -> Result<f64> {
    Ok(ball_growth(g, base, &[r], DEFAULT_NODE_CAP)?.volumes[0])
}

/// Number of homotopy classes of loops at `base` of length at most `r`,
/// the trivial class included.
pub fn count_classes(g: &MetricGraph, base: usize, r: f64) -> Result<u64> {
    Ok(ball_growth(g, base, &[r], DEFAULT_NODE_CAP)?.counts[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// `(log vol(R2) - log vol(R1)) / (R2 - R1)`.
    pub from_volume: f64,
    /// The same quotient with class counts.
    pub from_counts: f64,
    /// `|from_volume - from_counts| + 2 log(10) / (R2 - R1)`.
    pub error_bar: f64,
}

impl EntropyEstimate {
    pub fn value(&self) -> f64 {
        self.from_volume
    }
}

pub fn entropy_estimate(g: &MetricGraph, base: usize, r1: f64, r2: f64) -> Result<EntropyEstimate> {
    entropy_estimate_with_cap(g, base, r1, r2, DEFAULT_NODE_CAP)
}

pub fn entropy_estimate_with_cap(
    g: &MetricGraph,
    base: usize,
    r1: f64,
    r2: f64,
    cap: u64,
) -> Result<EntropyEstimate> {
    if !(r1 < r2) {
        return Err(Error::InvalidArgument(format!("need R1 < R2, got {r1} and {r2}")));
    }
    let growth = ball_growth(g, base, &[r1, r2], cap)?;
    let span = r2 - r1;
    let from_volume = (growth.volumes[1].ln() - growth.volumes[0].ln()) / span;
    let from_counts = ((growth.counts[1] as f64).ln() - (growth.counts[0] as f64).ln()) / span;
    Ok(EntropyEstimate {
        from_volume,
        from_counts,
        error_bar: (from_volume - from_counts).abs() + 2.0 / span * 10f64.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bouquet, two_vertex};
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_ball_is_an_interval() {
        let circle = bouquet(&[1.0]).unwrap();
        assert_abs_diff_eq!(ball_volume(&circle, 0, 5.0).unwrap(), 10.0, epsilon = 1e-12);
        assert_eq!(count_classes(&circle, 0, 5.0).unwrap(), 11);
    }

    #[test]
    fn figure_eight_hand_counts() {
        let g = bouquet(&[1.0, 1.0]).unwrap();
        assert_eq!(ball_volume(&g, 0, 1.0).unwrap(), 4.0);
        assert_eq!(ball_volume(&g, 0, 2.0).unwrap(), 16.0);
        assert_eq!(count_classes(&g, 0, 1.0).unwrap(), 5);
        assert_eq!(count_classes(&g, 0, 2.0).unwrap(), 17);
        assert_eq!(count_classes(&g, 0, 0.5).unwrap(), 1);
    }

    #[test]
    fn equal_bouquet_follows_regular_tree_recursion() {
        // Wedge of b unit circles: the cover is 2b-regular, sphere sizes
        // 2b (2b-1)^{k-1}, so vol(k) = Σ_{j<=k} 2b (2b-1)^{j-1}.
        for b in 2..=4usize {
            let g = bouquet(&vec![1.0; b]).unwrap();
            let growth = ball_growth(&g, 0, &[1.0, 2.0, 3.0, 4.0], DEFAULT_NODE_CAP).unwrap();
            let deg = 2 * b as u64;
            let mut expected = 0u64;
            for k in 1..=4u32 {
                expected += deg * (deg - 1).pow(k - 1);
                assert_eq!(growth.volumes[k as usize - 1], expected as f64);
                assert_eq!(growth.counts[k as usize - 1], expected + 1);
            }
        }
    }

    #[test]
    fn partial_edges_are_truncated() {
        let g = bouquet(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(ball_volume(&g, 0, 1.5).unwrap(), 4.0 + 12.0 * 0.5, epsilon = 1e-12);
    }

    #[test]
    fn growth_is_monotone() {
        let g = two_vertex(&[0.7, 1.3, 2.1]).unwrap();
        let radii: Vec<f64> = (1..=30).map(|k| k as f64 * 0.4).collect();
        let growth = ball_growth(&g, 1, &radii, DEFAULT_NODE_CAP).unwrap();
        assert!(growth.volumes.windows(2).all(|w| w[0] <= w[1]));
        assert!(growth.counts.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn budget_is_enforced() {
        let g = bouquet(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            ball_growth(&g, 0, &[20.0], 10_000),
            Err(Error::BudgetExceeded { cap: 10_000 })
        ));
    }

    #[test]
    fn estimates_on_small_graphs() {
        let g = bouquet(&[1.0, 1.0]).unwrap();
        let e = entropy_estimate(&g, 0, 6.0, 12.0).unwrap();
        assert!((e.value() - 3f64.ln()).abs() <= 0.05, "{e:?}");

        let theta = two_vertex(&[1.0, 1.0, 1.0]).unwrap();
        let e = entropy_estimate(&theta, 0, 8.0, 14.0).unwrap();
        assert!((e.value() - 2f64.ln()).abs() <= 0.05, "{e:?}");

        let circle = bouquet(&[1.0]).unwrap();
        // Linear growth: the quotient is ln(R2/R1)/(R2-R1).
        let e = entropy_estimate(&circle, 0, 20.0, 100.0).unwrap();
        assert!(e.value().abs() <= 0.05, "{e:?}");
    }
}
