//! Metric graphs with multi-edges and loops, and their dart structure.
//!
//! Edge `e` yields two darts: `2e` runs `u -> v` and `2e + 1` runs `v -> u`,
//! so reversal is `d ^ 1`. A loop contributes two distinct darts with equal
//! tail and head.

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// Vertex count plus an ordered edge list. Serializes to the graph file
/// format `{"vertices": N, "edges": [{"u": .., "v": .., "length": ..}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(rename = "vertices")]
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
}

impl GraphSpec {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        Self {
            vertex_count,
            edges: edges
                .into_iter()
                .map(|(u, v, length)| Edge { u, v, length })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.vertex_count || e.v >= self.vertex_count {
                return Err(Error::InvalidSpec(format!(
                    "edge {i} ({}, {}) references a vertex >= {}",
                    e.u, e.v, self.vertex_count
                )));
            }
            if !e.length.is_finite() || e.length <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "edge {i} has non-positive or non-finite length {}",
                    e.length
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph spec serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dart {
    pub tail: usize,
    pub head: usize,
    pub length: f64,
    pub edge: usize,
}

/// A validated graph together with its darts and per-vertex outgoing darts.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    spec: GraphSpec,
    darts: Vec<Dart>,
    out_darts: Vec<Vec<usize>>,
}

impl MetricGraph {
    pub fn new(spec: GraphSpec) -> Result<Self> {
        spec.validate()?;
        let mut darts = Vec::with_capacity(2 * spec.edges.len());
        let mut out_darts = vec![Vec::new(); spec.vertex_count];
        for (i, e) in spec.edges.iter().enumerate() {
            for (tail, head) in [(e.u, e.v), (e.v, e.u)] {
                out_darts[tail].push(darts.len());
                darts.push(Dart {
                    tail,
                    head,
                    length: e.length,
                    edge: i,
                });
            }
        }
        Ok(Self {
            spec,
            darts,
            out_darts,
        })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn vertex_count(&self) -> usize {
        self.spec.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.spec.edges.len()
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn dart(&self, d: usize) -> &Dart {
        &self.darts[d]
    }

    #[inline]
    pub fn reverse(d: usize) -> usize {
        d ^ 1
    }

    pub fn out_darts(&self, v: usize) -> &[usize] {
        &self.out_darts[v]
    }

    /// Loops count twice.
    pub fn degree(&self, v: usize) -> usize {
        self.out_darts[v].len()
    }

    /// Non-backtracking successors of `d`: darts leaving `head(d)` other
    /// than the reversal of `d`.
    pub fn successors(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        let rev = Self::reverse(d);
        self.out_darts[self.darts[d].head]
            .iter()
            .copied()
            .filter(move |&s| s != rev)
    }

    pub fn total_length(&self) -> f64 {
        self.spec.edges.iter().map(|e| e.length).sum()
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &d in &self.out_darts[v] {
                    let w = self.darts[d].head;
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.vertex_count())
            .filter(|&v| self.degree(v) == 1)
            .count()
    }
}

pub fn build_graph(spec: GraphSpec) -> Result<MetricGraph> {
    MetricGraph::new(spec)
}

/// Outcome of leaf pruning. `kept_vertices[i]` and `kept_edges[j]` give the
/// original indices of vertex `i` and edge `j` of the pruned graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Pruned {
    pub graph: MetricGraph,
    pub removed_vertices: Vec<usize>,
    pub kept_vertices: Vec<usize>,
    pub kept_edges: Vec<usize>,
}

/// Repeatedly deletes degree-1 vertices with their edge, then drops isolated
/// vertices. The result has minimum degree at least 2 or is empty.
pub fn prune_leaves_with_report(g: &MetricGraph) -> Pruned {
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut edge_alive = vec![true; g.edge_count()];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        if degree[v] != 1 {
            continue;
        }
        let d = g
            .out_darts(v)
            .iter()
            .copied()
            .find(|&d| edge_alive[g.dart(d).edge])
            .expect("degree-1 vertex has a live edge");
        edge_alive[g.dart(d).edge] = false;
        degree[v] = 0;
        let w = g.dart(d).head;
        degree[w] -= 1;
        if degree[w] == 1 {
            queue.push_back(w);
        }
    }

    let mut new_index = vec![usize::MAX; n];
    let mut kept_vertices = Vec::new();
    let mut removed_vertices = Vec::new();
    for v in 0..n {
        if degree[v] >= 2 {
            new_index[v] = kept_vertices.len();
            kept_vertices.push(v);
        } else {
            removed_vertices.push(v);
        }
    }
    let mut kept_edges = Vec::new();
    let mut edges = Vec::new();
    for (i, e) in g.spec().edges.iter().enumerate() {
        if edge_alive[i] {
            kept_edges.push(i);
            edges.push(Edge {
                u: new_index[e.u],
                v: new_index[e.v],
                length: e.length,
            });
        }
    }
    let graph = MetricGraph::new(GraphSpec {
        vertex_count: kept_vertices.len(),
        edges,
    })
    .expect("pruning preserves validity");
    Pruned {
        graph,
        removed_vertices,
        kept_vertices,
        kept_edges,
    }
}

pub fn prune_leaves(g: &MetricGraph) -> MetricGraph {
    prune_leaves_with_report(g).graph
}

/// First Betti number `E - V + #components`.
pub fn betti(g: &MetricGraph) -> usize {
    let (_, components) = g.components();
    g.edge_count() + components - g.vertex_count()
}

/// Wedge of circles at a single vertex.
pub fn bouquet(lengths: &[f64]) -> Result<MetricGraph> {
    MetricGraph::new(GraphSpec::new(
        1,
        lengths.iter().map(|&l| (0, 0, l)).collect(),
    ))
}

/// Two vertices joined by one edge per length.
pub fn two_vertex(lengths: &[f64]) -> Result<MetricGraph> {
    MetricGraph::new(GraphSpec::new(
        2,
        lengths.iter().map(|&l| (0, 1, l)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_eight() -> MetricGraph {
        bouquet(&[1.0, 1.0]).unwrap()
    }

    #[test]
    fn single_edge_has_two_mutually_reverse_darts() {
        let g = build_graph(GraphSpec::new(2, vec![(0, 1, 1.0)])).unwrap();
        assert_eq!(g.darts().len(), 2);
        assert_eq!(g.dart(0).tail, 0);
        assert_eq!(g.dart(0).head, 1);
        assert_eq!(g.dart(1).tail, 1);
        assert_eq!(MetricGraph::reverse(0), 1);
        assert_eq!(MetricGraph::reverse(1), 0);
    }

    #[test]
    fn loop_gives_two_distinct_darts() {
        let g = build_graph(GraphSpec::new(1, vec![(0, 0, 2.0)])).unwrap();
        assert_eq!(g.darts().len(), 2);
        for d in g.darts() {
            assert_eq!((d.tail, d.head), (0, 0));
            assert_eq!(d.length, 2.0);
        }
    }

    #[test]
    fn figure_eight_counts() {
        let g = figure_eight();
        assert_eq!(g.darts().len(), 4);
        assert_eq!(g.out_darts(0).len(), 4);
        // Each loop dart continues into itself and the other loop's two darts.
        assert_eq!(g.successors(0).collect::<Vec<_>>(), vec![0, 2, 3]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            build_graph(GraphSpec::new(2, vec![(0, 2, 1.0)])),
            Err(Error::InvalidSpec(_))
        ));
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(build_graph(GraphSpec::new(2, vec![(0, 1, bad)])).is_err());
        }
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let text = r#"{"vertices": 2, "edges": [{"u": 0, "v": 1, "length": 1.5}]}"#;
        let spec = GraphSpec::from_json(text).unwrap();
        assert_eq!(spec.edges[0].length, 1.5);
        assert_eq!(GraphSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert!(GraphSpec::from_json(r#"{"vertices": 2, "edges": [{"u": 0, "v": 1, "length": 0}]}"#).is_err());
        assert!(GraphSpec::from_json(r#"{"vertices": 2, "edges": [{"u": 0, "v": 1, "length": NaN}]}"#).is_err());
        assert!(GraphSpec::from_json(r#"{"vertices": 2, "edges": [{"u": 0, "v": 1, "length": 1e999}]}"#).is_err());
        assert!(GraphSpec::from_json(r#"{"vertices": 1, "edges": [{"u": 0, "v": 1, "length": 1}]}"#).is_err());
    }

    #[test]
    fn path_prunes_to_empty() {
        let g = build_graph(GraphSpec::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)])).unwrap();
        let p = prune_leaves_with_report(&g);
        assert_eq!(p.graph.vertex_count(), 0);
        assert_eq!(p.graph.edge_count(), 0);
        assert_eq!(p.removed_vertices, vec![0, 1, 2]);
    }

    #[test]
    fn pendant_is_removed_from_figure_eight() {
        let g = build_graph(GraphSpec::new(
            3,
            vec![(0, 0, 1.0), (0, 1, 0.5), (0, 0, 1.0), (1, 2, 0.25)],
        ))
        .unwrap();
        let p = prune_leaves_with_report(&g);
        assert_eq!(p.graph, figure_eight());
        assert_eq!(p.kept_edges, vec![0, 2]);
        assert_eq!(p.removed_vertices, vec![1, 2]);
    }

    #[test]
    fn figure_eight_is_a_fixed_point() {
        let g = figure_eight();
        assert_eq!(prune_leaves(&g), g);
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(betti(&bouquet(&[1.0]).unwrap()), 1);
        assert_eq!(betti(&figure_eight()), 2);
        assert_eq!(betti(&two_vertex(&[1.0, 1.0, 1.0]).unwrap()), 2);
        let two_circles = build_graph(GraphSpec::new(2, vec![(0, 0, 1.0), (1, 1, 1.0)])).unwrap();
        assert_eq!(betti(&two_circles), 2);
    }
}
