//! Chord diagrams: a circle with `2n` cyclically ordered vertices joined in
//! pairs by `n` chords.
//!
//! Internally vertices are `0..2n`. Arc `p` runs from vertex `p - 1`
//! (cyclically) to vertex `p`, so arc `p` ends at vertex `p`. The JSON form
//! labels vertices `1..=2n`, matching the usual `v_1, …, v_{2n}` notation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, MetricGraph};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct ChordDiagram {
    arcs: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    chords: Vec<f64>,
    partner: Vec<usize>,
    chord_at: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramJson {
    n: usize,
    arcs: Vec<f64>,
    matching: Vec<[usize; 2]>,
    chords: Vec<f64>,
}

impl ChordDiagram {
    /// `pairs` are 0-based vertex pairs; `chords[k]` is the length of the
    /// chord joining `pairs[k]`.
    pub fn new(arcs: Vec<f64>, pairs: Vec<(usize, usize)>, chords: Vec<f64>) -> Result<Self> {
        let n = pairs.len();
        if n == 0 {
            return Err(Error::InvalidDiagram("at least one chord is required".into()));
        }
        if arcs.len() != 2 * n {
            return Err(Error::InvalidDiagram(format!(
                "{} arcs for {n} chords, expected {}",
                arcs.len(),
                2 * n
            )));
        }
        if chords.len() != n {
            return Err(Error::InvalidDiagram(format!(
                "{} chord lengths for {n} pairs",
                chords.len()
            )));
        }
        for (what, values) in [("arc", &arcs), ("chord", &chords)] {
            if let Some((i, l)) = values
                .iter()
                .enumerate()
                .find(|(_, l)| !l.is_finite() || **l <= 0.0)
            {
                return Err(Error::InvalidDiagram(format!("{what} {i} has length {l}")));
            }
        }
        let mut partner = vec![usize::MAX; 2 * n];
        let mut chord_at = vec![usize::MAX; 2 * n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if a >= 2 * n || b >= 2 * n || a == b {
                return Err(Error::InvalidDiagram(format!("bad pair ({a}, {b})")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::InvalidDiagram(format!(
                    "vertex used twice in pair ({a}, {b})"
                )));
            }
            partner[a] = b;
            partner[b] = a;
            chord_at[a] = k;
            chord_at[b] = k;
        }
        Ok(Self {
            arcs,
            pairs,
            chords,
            partner,
            chord_at,
        })
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.n()
    }

    pub fn arcs(&self) -> &[f64] {
        &self.arcs
    }

    pub fn chords(&self) -> &[f64] {
        &self.chords
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The matching involution.
    pub fn partner(&self, v: usize) -> usize {
        self.partner[v]
    }

    /// Index of the chord incident to vertex `v`.
    pub fn chord_at(&self, v: usize) -> usize {
        self.chord_at[v]
    }

    /// Length of the chord incident to vertex `v`; equal at both ends.
    pub fn chord_length_at(&self, v: usize) -> f64 {
        self.chords[self.chord_at[v]]
    }

    pub fn circle_length(&self) -> f64 {
        self.arcs.iter().sum()
    }

    /// Same diagram with pairs sorted by smaller endpoint, each pair ordered.
    pub fn canonical(&self) -> Self {
        let mut tagged: Vec<((usize, usize), f64)> = self
            .pairs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .zip(self.chords.iter().copied())
            .collect();
        tagged.sort_by_key(|&(p, _)| p);
        let (pairs, chords) = tagged.into_iter().unzip();
        Self::new(self.arcs.clone(), pairs, chords).expect("canonical form stays valid")
    }

    /// Every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.arcs.iter().map(|l| l * c).collect(),
            self.pairs.clone(),
            self.chords.iter().map(|l| l * c).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiagramJson = serde_json::from_str(text)?;
        if raw.matching.len() != raw.n {
            return Err(Error::InvalidDiagram(format!(
                "n = {} but {} pairs in matching",
                raw.n,
                raw.matching.len()
            )));
        }
        let mut pairs = Vec::with_capacity(raw.n);
        for [a, b] in raw.matching {
            if a == 0 || b == 0 {
                return Err(Error::InvalidDiagram("vertex labels start at 1".into()));
            }
            pairs.push((a - 1, b - 1));
        }
        Self::new(raw.arcs, pairs, raw.chords)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let raw = DiagramJson {
            n: self.n(),
            arcs: self.arcs.clone(),
            matching: self.pairs.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            chords: self.chords.clone(),
        };
        serde_json::to_string(&raw).expect("diagram serializes")
    }
}

/// Edge `p < 2n` is arc `p` from vertex `p - 1` to `p`; edge `2n + k` is
/// chord `k` oriented from `pairs[k].0` to `pairs[k].1`.
pub fn realize_spec(cd: &ChordDiagram) -> GraphSpec {
    let m = cd.vertex_count();
    let mut edges = Vec::with_capacity(3 * cd.n());
    for (p, &l) in cd.arcs.iter().enumerate() {
        edges.push(((p + m - 1) % m, p, l));
    }
    for (&(a, b), &l) in cd.pairs.iter().zip(&cd.chords) {
        edges.push((a, b, l));
    }
    GraphSpec::new(m, edges)
}

pub fn realize_graph(cd: &ChordDiagram) -> MetricGraph {
    MetricGraph::new(realize_spec(cd)).expect("diagram lengths are positive")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthRange {
    pub lo: f64,
    pub hi: f64,
}

impl LengthRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn check(&self, what: &str) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{what} range [{}, {}] must be a positive interval",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Uniform random matching plus i.i.d. uniform lengths, all drawn from a
/// single seeded stream: Fisher–Yates shuffle of `0..2n` paired off
/// consecutively, then the `2n` arcs, then the `n` chords in canonical
/// pair order.
pub fn random_chord_diagram(
    n: usize,
    seed: u64,
    arc_range: LengthRange,
    chord_range: LengthRange,
) -> Result<ChordDiagram> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    arc_range.check("arc")?;
    chord_range.check("chord")?;
    let mut rng = rng::seeded(seed);
    let mut perm: Vec<usize> = (0..2 * n).collect();
    for i in (1..2 * n).rev() {
        let j = rng::index(&mut rng, i);
        perm.swap(i, j);
    }
    let mut pairs: Vec<(usize, usize)> = perm
        .chunks_exact(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    pairs.sort_unstable();
    let arcs = (0..2 * n)
        .map(|_| rng::uniform(&mut rng, arc_range.lo, arc_range.hi))
        .collect();
    let chords = (0..n)
        .map(|_| rng::uniform(&mut rng, chord_range.lo, chord_range.hi))
        .collect();
    ChordDiagram::new(arcs, pairs, chords)
}

/// Adds one chord whose endpoints split arcs `insertion.0` and `insertion.1`
/// (possibly the same arc) at seeded uniform fractions. Removing the new
/// chord and smoothing its two endpoints gives back the original diagram,
/// and the circle length is unchanged.
pub fn extend_diagram(
    cd: &ChordDiagram,
    new_chord_length: f64,
    insertion: (usize, usize),
    seed: u64,
) -> Result<ChordDiagram> {
    let m = cd.vertex_count();
    if insertion.0 >= m || insertion.1 >= m {
        return Err(Error::InvalidInsertion(format!(
            "arc positions {insertion:?} out of range for {m} arcs"
        )));
    }
    if !(new_chord_length.is_finite() && new_chord_length > 0.0) {
        return Err(Error::InvalidInsertion(format!(
            "chord length {new_chord_length} must be positive"
        )));
    }
    let mut rng = rng::seeded(seed);
    let t1 = rng::open_unit(&mut rng);
    let t2 = rng::open_unit(&mut rng);
    let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); m];
    cuts[insertion.0].push(t1);
    cuts[insertion.1].push(t2);
    if insertion.0 == insertion.1 {
        if t1 == t2 {
            return Err(Error::InvalidInsertion("coincident split points".into()));
        }
        cuts[insertion.0].sort_by(f64::total_cmp);
    }

    let mut arcs = Vec::with_capacity(m + 2);
    let mut old_to_new = vec![0; m];
    let mut new_vertices = Vec::with_capacity(2);
    for (p, &length) in cd.arcs.iter().enumerate() {
        let mut consumed = 0.0;
        let mut prev = 0.0;
        for &t in &cuts[p] {
            let piece = (t - prev) * length;
            if piece <= 0.0 {
                return Err(Error::InvalidInsertion("zero-length split".into()));
            }
            arcs.push(piece);
            consumed += piece;
            prev = t;
            new_vertices.push(arcs.len() - 1);
        }
        let rest = length - consumed;
        if rest <= 0.0 {
            return Err(Error::InvalidInsertion("zero-length split".into()));
        }
        arcs.push(rest);
        old_to_new[p] = arcs.len() - 1;
    }
    let mut pairs: Vec<(usize, usize)> = cd
        .pairs
        .iter()
        .map(|&(a, b)| (old_to_new[a], old_to_new[b]))
        .collect();
    pairs.push((new_vertices[0], new_vertices[1]));
    let mut chords = cd.chords.clone();
    chords.push(new_chord_length);
    Ok(ChordDiagram::new(arcs, pairs, chords)?.canonical())
}
