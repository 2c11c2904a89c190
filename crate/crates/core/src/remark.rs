//! Counting claim behind the non-sharpness of the `sinh` upper bound.
//!
//! For a circle cut into segments `L_1..L_N` and vertex `i`,
//! `C(i) = #{k : cosh(h(Σ_{j=k+1}^{i} L_j - L/2)) > cosh(hL/4)}`, which is
//! the number of `k` whose cyclic sum `Σ_{j=k+1}^{i} L_j` lies below `L/4` or
//! above `3L/4`. The claim is `#{i : C(i) >= N/4} >= N/2`.
//!
//! Here the cyclic sum from `k + 1` to `i` has `(i - k) mod N` terms, so
//! `k = i` is the empty sum 0 and always counts. Comparisons are strict.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct RemarkInstance {
    segments: Vec<f64>,
    h: f64,
    circle: f64,
}

impl RemarkInstance {
    pub fn new(segments: Vec<f64>, h: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("need at least one segment".into()));
        }
        if let Some(l) = segments.iter().find(|l| !l.is_finite() || **l <= 0.0) {
            return Err(Error::InvalidArgument(format!("segment length {l} must be positive")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("h = {h} must be positive")));
        }
        let circle = segments.iter().sum();
        Ok(Self { segments, h, circle })
    }

    pub fn n(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[f64] {
        &self.segments
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn circle_length(&self) -> f64 {
        self.circle
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.segments.clone(), h)
    }

    /// Cyclic sums `Σ_{j=k+1}^{i} L_j` for every `k`, indexed by `k`
    /// (0-based segments and vertices; segment `j` ends at vertex `j`).
    fn sums_into(&self, i: usize) -> Vec<f64> {
        let n = self.n();
        let mut sums = vec![0.0; n];
        // Walk backwards from k = i: each step prepends segment k + 1.
        let mut acc = 0.0;
        for step in 1..n {
            let k = (i + n - step) % n;
            acc += self.segments[(k + 1) % n];
            sums[k] = acc;
        }
        sums
    }
}

pub fn c_counts(inst: &RemarkInstance) -> Vec<usize> {
    let quarter = 0.25 * inst.circle;
    let three_quarters = 0.75 * inst.circle;
    (0..inst.n())
        .map(|i| {
            inst.sums_into(i)
                .into_iter()
                .filter(|&s| s < quarter || s > three_quarters)
                .count()
        })
        .collect()
}

/// `C(i)` evaluated with the original `cosh` criterion at the instance's `h`.
pub fn c_counts_cosh(inst: &RemarkInstance) -> Vec<usize> {
    let h = inst.h;
    let half = 0.5 * inst.circle;
    let threshold = (0.25 * h * inst.circle).cosh();
    (0..inst.n())
        .map(|i| {
            inst.sums_into(i)
                .into_iter()
                .filter(|&s| (h * (s - half)).cosh() > threshold)
                .count()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimOutcome {
    pub holds: bool,
    /// `#{i : C(i) >= N/4}`.
    pub witnesses: usize,
    pub n: usize,
    pub counts: Vec<usize>,
}

pub fn verify_claim(inst: &RemarkInstance) -> ClaimOutcome {
    let counts = c_counts(inst);
    let n = inst.n();
    let witnesses = counts.iter().filter(|&&c| 4 * c >= n).count();
    ClaimOutcome {
        holds: 2 * witnesses >= n,
        witnesses,
        n,
        counts,
    }
}

/// Random instance: `N` uniform in `1..=n_max`, segment lengths
/// log-uniform on `[1e-3, 1]`, `h` log-uniform on `[0.1, 10]`.
pub fn random_instance(n_max: usize, seed: u64) -> Result<RemarkInstance> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let mut r = rng::seeded(seed);
    let n = 1 + rng::index(&mut r, n_max - 1);
    let lo = 1e-3f64.ln();
    let segments = (0..n).map(|_| rng::uniform(&mut r, lo, 0.0).exp()).collect();
    let h = rng::uniform(&mut r, 0.1f64.ln(), 10f64.ln()).exp();
    RemarkInstance::new(segments, h)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemarkSummary {
    pub checked: usize,
    pub failures: usize,
    pub n_max: usize,
    pub seed: u64,
    /// Trial seeds of failing instances.
    pub failing_seeds: Vec<u64>,
}

pub fn survey_claim(n_max: usize, trials: usize, seed: u64) -> Result<RemarkSummary> {
    let mut failing_seeds = Vec::new();
    for s in rng::trial_seeds(seed, trials) {
        if !verify_claim(&random_instance(n_max, s)?).holds {
            failing_seeds.push(s);
        }
    }
    Ok(RemarkSummary {
        checked: trials,
        failures: failing_seeds.len(),
        n_max,
        seed,
        failing_seeds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct transcription of the definition with explicit index walks.
    fn brute_force(segments: &[f64]) -> Vec<usize> {
        let n = segments.len();
        let total: f64 = segments.iter().sum();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&k| {
                        let mut s = 0.0;
                        let mut j = k;
                        while j != i {
                            j = (j + 1) % n;
                            s += segments[j];
                        }
                        s < total / 4.0 || s > 3.0 * total / 4.0
                    })
                    .count()
            })
            .collect()
    }

    #[test]
    fn four_equal_segments() {
        let inst = RemarkInstance::new(vec![1.0; 4], 0.7).unwrap();
        assert_eq!(c_counts(&inst), vec![1, 1, 1, 1]);
        let out = verify_claim(&inst);
        assert!(out.holds);
        assert_eq!(out.witnesses, 4);
    }

    #[test]
    fn two_segments_by_hand() {
        // L = (1, 3), L/4 = 1, 3L/4 = 3. Vertex 0: k=1 gives L_0 = 1 (not < 1).
        // Vertex 1: k=0 gives L_1 = 3 (not > 3). Only k = i counts.
        let inst = RemarkInstance::new(vec![1.0, 3.0], 1.0).unwrap();
        assert_eq!(c_counts(&inst), brute_force(&[1.0, 3.0]));
        assert_eq!(c_counts(&inst), vec![1, 1]);
        assert!(verify_claim(&inst).holds);
    }

    #[test]
    fn single_segment() {
        let inst = RemarkInstance::new(vec![2.0], 1.0).unwrap();
        let out = verify_claim(&inst);
        assert_eq!(out.counts, vec![1]);
        assert_eq!(out.witnesses, 1);
        assert!(out.holds);
    }

    #[test]
    fn matches_brute_force_and_cosh_form() {
        for seed in 0..300 {
            let inst = random_instance(30, seed).unwrap();
            let counts = c_counts(&inst);
            assert_eq!(counts, brute_force(inst.segments()));
            for h in [0.1, 1.0, 10.0] {
                let scaled = RemarkInstance::new(
                    inst.segments().iter().map(|l| l / inst.circle_length()).collect(),
                    h,
                )
                .unwrap();
                assert_eq!(c_counts_cosh(&scaled), counts, "seed {seed} h {h}");
                assert_eq!(c_counts(&inst.with_h(h).unwrap()), counts);
            }
        }
    }

    #[test]
    fn scale_free() {
        let inst = random_instance(20, 3).unwrap();
        let scaled =
            RemarkInstance::new(inst.segments().iter().map(|l| l * 7.5).collect(), inst.h()).unwrap();
        assert_eq!(c_counts(&scaled), c_counts(&inst));
    }

    #[test]
    fn rejects_bad_instances() {
        assert!(RemarkInstance::new(vec![], 1.0).is_err());
        assert!(RemarkInstance::new(vec![1.0, 0.0], 1.0).is_err());
        assert!(RemarkInstance::new(vec![1.0], 0.0).is_err());
    }
}
