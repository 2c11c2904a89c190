//! Exact entropy identities for bouquets and two-vertex graphs, and the
//! reduced `2n × 2n` system obtained from the transfer system of a chord
//! graph by eliminating the circle darts.

use crate::chord::ChordDiagram;
use crate::error::{Error, Result};
use crate::numeric::{bisect_decreasing, inv_one_plus_exp, perron_robust, PerronPair};

const ROOT_TOL: f64 = 1e-13;
const ROOT_LO: f64 = 1e-12;

fn logistic_sum(h: f64, lengths: &[f64]) -> f64 {
    lengths.iter().map(|&l| inv_one_plus_exp(h * l)).sum()
}

fn check_lengths(lengths: &[f64]) -> Result<()> {
    match lengths.iter().find(|l| !l.is_finite() || **l <= 0.0) {
        Some(l) => Err(Error::InvalidArgument(format!("length {l} must be positive"))),
        None => Ok(()),
    }
}

/// Entropy of a wedge of circles: the root of `Σ 1/(1+e^{hℓ}) = 1/2`.
pub fn bouquet_entropy(lengths: &[f64]) -> Result<f64> {
    if lengths.len() < 2 {
        return Err(Error::TooFewCircles(lengths.len()));
    }
    check_lengths(lengths)?;
    Ok(bisect_decreasing(|h| logistic_sum(h, lengths) - 0.5, ROOT_LO, ROOT_TOL)?.0)
}

/// Entropy of two vertices joined by `lengths.len()` edges: the root of
/// `Σ 1/(1+e^{hℓ}) = 1`.
pub fn two_vertex_entropy(lengths: &[f64]) -> Result<f64> {
    if lengths.len() < 3 {
        return Err(Error::TooFewEdges(lengths.len()));
    }
    check_lengths(lengths)?;
    Ok(bisect_decreasing(|h| logistic_sum(h, lengths) - 1.0, ROOT_LO, ROOT_TOL)?.0)
}

/// `tanh(hL/2) - 2 Σ 1/(1+e^{hℓ_i})` for a bouquet made of one circle of
/// length `circle` and loops `loops`; zero at the bouquet's entropy.
pub fn bouquet_split_residual(circle: f64, loops: &[f64], h: f64) -> f64 {
    (0.5 * h * circle).tanh() - 2.0 * logistic_sum(h, loops)
}

/// `tanh(hL/4) - Σ 1/(1+e^{hℓ_i})` for a circle of length `circle` split
/// into two halves whose endpoints are joined by edges `chords`; zero at
/// the graph's entropy.
pub fn two_vertex_split_residual(circle: f64, chords: &[f64], h: f64) -> f64 {
    (0.25 * h * circle).tanh() - logistic_sum(h, chords)
}

/// Cyclic arc sums over a chord diagram's circle.
#[derive(Debug, Clone)]
struct CyclicSums {
    prefix: Vec<f64>,
}

impl CyclicSums {
    fn new(arcs: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(arcs.len() + 1);
        prefix.push(0.0);
        for l in arcs {
            prefix.push(prefix.last().unwrap() + l);
        }
        Self { prefix }
    }

    fn len(&self) -> usize {
        self.prefix.len() - 1
    }

    /// `Σ_{j=a}^{b} L_j` walking forward from `a`; the walk always has
    /// `((b - a) mod m) + 1` terms, so `from == to + 1` is the whole circle.
    fn sum(&self, from: usize, to: usize) -> f64 {
        let m = self.len();
        let count = (to + m - from) % m + 1;
        let end = from + count;
        if end <= m {
            self.prefix[end] - self.prefix[from]
        } else {
            (self.prefix[m] - self.prefix[from]) + self.prefix[end - m]
        }
    }
}

/// The reduced chord system at a given `h`.
///
/// Indices are 0-based: vertex `k` here is `v_{k+1}` in the 1-based
/// notation, arc `k` ends at vertex `k`, and all index arithmetic is mod
/// `2n`. `Y_k` is the chord dart leaving vertex `k`; the system reads
/// `Y_{ω(k)} = Σ_i entry(k, i) Y_i`, so row `ω(k)` of the matrix holds
/// `entry(k, ·)`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    h: f64,
    diagram: ChordDiagram,
    sums: CyclicSums,
    circle: f64,
    matrix: Vec<Vec<f64>>,
}

pub fn reduced_chord_system(cd: &ChordDiagram, h: f64) -> Result<ReducedSystem> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("h = {h} must be positive")));
    }
    if let Some(i) = cd.arcs().iter().position(|&l| l <= 0.0) {
        return Err(Error::DegenerateArc(i));
    }
    let m = cd.vertex_count();
    let mut system = ReducedSystem {
        h,
        diagram: cd.clone(),
        sums: CyclicSums::new(cd.arcs()),
        circle: cd.circle_length(),
        matrix: vec![vec![0.0; m]; m],
    };
    for k in 0..m {
        let row = cd.partner(k);
        for i in 0..m {
            system.matrix[row][i] = system.exp_form_entry(k, i);
        }
    }
    Ok(system)
}

impl ReducedSystem {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    fn arc(&self, k: usize) -> f64 {
        self.diagram.arcs()[k % self.dim()]
    }

    /// `1 - e^{-hL}`.
    fn wrap_denominator(&self) -> f64 {
        -(-self.h * self.circle).exp_m1()
    }

    /// `α_{i,k} = exp(-h (Σ_{j=k}^{i} L_j - L_k))`.
    pub fn alpha(&self, i: usize, k: usize) -> f64 {
        (-self.h * (self.sums.sum(k, i) - self.arc(k))).exp()
    }

    /// `β_{i,k} = exp(-h (Σ_{j=i+1}^{k} L_j - L_k))`. For `i = k` the sum
    /// wraps the whole circle.
    pub fn beta(&self, i: usize, k: usize) -> f64 {
        let m = self.dim();
        (-self.h * (self.sums.sum((i + 1) % m, k) - self.arc(k))).exp()
    }

    /// `e^{-hℓ'_i} (e^{-hL_{k+1}} α_{i,k+1} + e^{-hL_k} β_{i,k}) / (1 - e^{-hL})`.
    pub fn exp_form_entry(&self, k: usize, i: usize) -> f64 {
        let m = self.dim();
        let k1 = (k + 1) % m;
        let chord = (-self.h * self.diagram.chord_length_at(i)).exp();
        let forward = (-self.h * self.arc(k1)).exp() * self.alpha(i, k1);
        let backward = (-self.h * self.arc(k)).exp() * self.beta(i, k);
        chord * (forward + backward) / self.wrap_denominator()
    }

    /// The same entry written as `e^{-hℓ'_i} cosh(h(Σ_{j=k+1}^{i} L_j - L/2)) / sinh(hL/2)`
    /// for `i ≠ k`, and `e^{-hℓ'_k} e^{-hL/2} / sinh(hL/2)` on the diagonal.
    pub fn cosh_form_entry(&self, k: usize, i: usize) -> f64 {
        let m = self.dim();
        let chord = (-self.h * self.diagram.chord_length_at(i)).exp();
        let half = 0.5 * self.h * self.circle;
        if i == k {
            chord * (-half).exp() / half.sinh()
        } else {
            let s = self.sums.sum((k + 1) % m, i);
            chord * (self.h * (s - 0.5 * self.circle)).cosh() / half.sinh()
        }
    }

    pub fn perron(&self, tol: f64) -> Result<PerronPair> {
        perron_robust(
            self.dim(),
            |x, y| {
                for (yi, row) in y.iter_mut().zip(&self.matrix) {
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            },
            || self.matrix.clone(),
            tol,
            crate::lim::DEFAULT_MAX_ITER,
        )
    }

    fn weighted(&self, y: &[f64]) -> Vec<f64> {
        let denom = self.wrap_denominator();
        y.iter()
            .enumerate()
            .map(|(i, yi)| (-self.h * self.diagram.chord_length_at(i)).exp() / denom * yi)
            .collect()
    }

    /// Forward circle darts: `X_k = Σ_i α_{i,k} e^{-hℓ'_i} / (1 - e^{-hL}) Y_i`.
    pub fn forward_from_y(&self, y: &[f64]) -> Vec<f64> {
        let w = self.weighted(y);
        (0..self.dim())
            .map(|k| (0..self.dim()).map(|i| self.alpha(i, k) * w[i]).sum())
            .collect()
    }

    /// Backward circle darts: `X̄_k = Σ_i β_{i,k} e^{-hℓ'_i} / (1 - e^{-hL}) Y_i`.
    pub fn backward_from_y(&self, y: &[f64]) -> Vec<f64> {
        let w = self.weighted(y);
        (0..self.dim())
            .map(|k| (0..self.dim()).map(|i| self.beta(i, k) * w[i]).sum())
            .collect()
    }

    /// Full transfer-system vector in the dart order of
    /// [`crate::chord::realize_graph`].
    pub fn lim_vector_from_y(&self, y: &[f64]) -> Vec<f64> {
        let m = self.dim();
        let forward = self.forward_from_y(y);
        let backward = self.backward_from_y(y);
        let mut x = Vec::with_capacity(3 * m);
        for k in 0..m {
            x.push(forward[k]);
            x.push(backward[k]);
        }
        for &(a, b) in self.diagram.pairs() {
            x.push(y[a]);
            x.push(y[b]);
        }
        x
    }

    /// `Z_c = (1 + e^{-hℓ_c}) (Y_a + Y_b)` for chord `c` joining `a` and `b`.
    pub fn z_values(&self, y: &[f64]) -> Vec<f64> {
        self.diagram
            .pairs()
            .iter()
            .zip(self.diagram.chords())
            .map(|(&(a, b), &l)| (1.0 + (-self.h * l).exp()) * (y[a] + y[b]))
            .collect()
    }

    /// Smallest margin in `Z_k <= (2 / tanh(hL/2)) Σ_i Z_i / (1 + e^{hℓ_i})`.
    pub fn z_chain_margin(&self, y: &[f64]) -> f64 {
        let z = self.z_values(y);
        let bound = 2.0 / (0.5 * self.h * self.circle).tanh()
            * z.iter()
                .zip(self.diagram.chords())
                .map(|(zi, &l)| zi * inv_one_plus_exp(self.h * l))
                .sum::<f64>();
        z.iter().map(|zk| bound - zk).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::{random_chord_diagram, realize_graph, LengthRange};
    use crate::lim::volume_entropy;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bouquet_values() {
        assert_abs_diff_eq!(bouquet_entropy(&[1.0, 1.0]).unwrap(), 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(bouquet_entropy(&[1.0, 1.0, 1.0]).unwrap(), 5f64.ln(), epsilon = 1e-12);
        assert!(matches!(bouquet_entropy(&[1.0]), Err(Error::TooFewCircles(1))));
    }

    #[test]
    fn bouquet_split_identity_holds_at_root() {
        let h = bouquet_entropy(&[2.0, 1.0]).unwrap();
        // Reference root from an independent high-precision solve.
        assert_abs_diff_eq!(h, 0.756_307_612_615_964_8, epsilon = 1e-12);
        assert_abs_diff_eq!(bouquet_split_residual(2.0, &[1.0], h), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn two_vertex_values() {
        assert_abs_diff_eq!(two_vertex_entropy(&[1.0; 3]).unwrap(), 2f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(two_vertex_entropy(&[1.0; 4]).unwrap(), 3f64.ln(), epsilon = 1e-12);
        assert!(matches!(two_vertex_entropy(&[1.0, 1.0]), Err(Error::TooFewEdges(2))));
    }

    #[test]
    fn antipodal_split_identity() {
        // tanh(ln 2 / 2) = 1/3 = 1/(1 + e^{ln 2}).
        let h = 2f64.ln();
        assert_abs_diff_eq!((h / 2.0).tanh(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two_vertex_split_residual(2.0, &[1.0], h), 0.0, epsilon = 1e-15);
        let h = two_vertex_entropy(&[1.5, 1.5, 0.7, 2.0]).unwrap();
        assert_abs_diff_eq!(two_vertex_split_residual(3.0, &[0.7, 2.0], h), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cyclic_sums_follow_the_term_count_rule() {
        let s = CyclicSums::new(&[1.0, 2.0, 4.0, 8.0]);
        assert_eq!(s.sum(1, 2), 6.0);
        assert_eq!(s.sum(3, 0), 9.0);
        assert_eq!(s.sum(2, 2), 4.0);
        assert_eq!(s.sum(2, 1), 15.0);
    }

    #[test]
    fn theta_instance_has_radius_one() {
        let cd = ChordDiagram::new(vec![1.0, 1.0], vec![(0, 1)], vec![1.0]).unwrap();
        let sys = reduced_chord_system(&cd, 2f64.ln()).unwrap();
        assert_eq!(sys.dim(), 2);
        let pair = sys.perron(1e-14).unwrap();
        assert_abs_diff_eq!(pair.rho, 1.0, epsilon = 1e-12);
        // By symmetry the Lim vector is constant.
        let x = sys.lim_vector_from_y(&pair.vector);
        assert!(x.iter().all(|v| (v / x[0] - 1.0).abs() < 1e-12));
    }

    #[test]
    fn two_entry_forms_agree() {
        let range = LengthRange::new(0.05, 4.0);
        for seed in 0..40 {
            let cd = random_chord_diagram(1 + seed as usize % 5, seed, range, range).unwrap();
            for h in [0.1, 1.0, 10.0] {
                let sys = reduced_chord_system(&cd, h).unwrap();
                for k in 0..sys.dim() {
                    for i in 0..sys.dim() {
                        let a = sys.exp_form_entry(k, i);
                        let b = sys.cosh_form_entry(k, i);
                        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn far_above_entropy_radius_is_small() {
        let range = LengthRange::new(0.05, 4.0);
        let cd = random_chord_diagram(4, 9, range, range).unwrap();
        let h = volume_entropy(&realize_graph(&cd), 1e-12).unwrap().h;
        let pair = reduced_chord_system(&cd, 5.0 * h).unwrap().perron(1e-13).unwrap();
        assert!(pair.rho < 1.0);
    }

    #[test]
    fn symmetric_diagram_has_constant_y() {
        let cd = ChordDiagram::new(vec![0.5; 4], vec![(0, 2), (1, 3)], vec![1.0, 1.0]).unwrap();
        let h = volume_entropy(&realize_graph(&cd), 1e-12).unwrap().h;
        let pair = reduced_chord_system(&cd, h).unwrap().perron(1e-14).unwrap();
        assert!(pair.vector.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn reduced_vector_reproduces_lim_solution() {
        let range = LengthRange::new(0.05, 4.0);
        for seed in 100..120 {
            let cd = random_chord_diagram(1 + seed as usize % 6, seed, range, range).unwrap();
            let r = volume_entropy(&realize_graph(&cd), 1e-12).unwrap();
            let sys = reduced_chord_system(&cd, r.h).unwrap();
            let pair = sys.perron(1e-14).unwrap();
            assert!((pair.rho - 1.0).abs() < 1e-8);
            let x = sys.lim_vector_from_y(&pair.vector);
            let max = x.iter().copied().fold(0.0, f64::max);
            for (a, b) in x.iter().zip(&r.perron_vector) {
                assert!((a / max - b).abs() <= 1e-8 * b.max(1e-300), "{a} {b}");
            }
            assert!(sys.z_chain_margin(&pair.vector) >= -1e-12);
        }
    }
}
