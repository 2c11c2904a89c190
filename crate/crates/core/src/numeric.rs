//! Scalar helpers shared by the solvers: monotone bisection, compensated
//! summation and the Perron iteration for small nonnegative operators.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `1 / (1 + e^x)`, evaluated without overflow for large `x`.
pub fn inv_one_plus_exp(x: f64) -> f64 {
    if x > 0.0 {
        let t = (-x).exp();
        t / (1.0 + t)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Finds the root of a strictly decreasing function on `(lo, ∞)`.
///
/// `f(lo)` must be positive. The upper end starts at `max(1, 2 lo)` and
/// doubles until `f` turns nonpositive. Returns the midpoint of the final
/// bracket once its width is at most `tol`.
pub fn bisect_decreasing<F>(f: F, lo: f64, tol: f64) -> Result<(f64, (f64, f64))>
where
    F: Fn(f64) -> f64,
{
    let mut lo = lo;
    if !(f(lo) > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "function is not positive at the lower end {lo}"
        )));
    }
    let mut hi = (2.0 * lo).max(1.0);
    let mut doublings = 0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: doublings });
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), (lo, hi)))
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Result of a Perron iteration: the spectral radius bracket and the
/// normalized (max entry 1) nonnegative fixed vector.
#[derive(Debug, Clone)]
pub struct PerronPair {
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration for an irreducible nonnegative operator of dimension `dim`.
///
/// Iterates `x <- (A + sI) x` from the all-ones vector, with `s` the largest
/// row sum; the shift removes the periodicity that non-backtracking
/// operators often have. Stops when the
/// Collatz–Wielandt bounds `min (Ax)_i / x_i <= rho <= max (Ax)_i / x_i`
/// agree to relative tolerance `tol`.
pub fn perron_iteration<F>(dim: usize, apply: F, tol: f64, max_iter: usize) -> Result<PerronPair>
where
    F: Fn(&[f64], &mut [f64]),
{
    if dim == 0 {
        return Ok(PerronPair {
            rho: 0.0,
            lower: 0.0,
            upper: 0.0,
            vector: Vec::new(),
            iterations: 0,
        });
    }
    let mut x = vec![1.0; dim];
    let mut ax = vec![0.0; dim];
    // Shift by the first upper bound, so the damping of the periodic part
    // does not depend on the scale of the matrix.
    let mut shift = None;
    for iter in 0..=max_iter {
        apply(&x, &mut ax);
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        for (xi, axi) in x.iter().zip(&ax) {
            let r = axi / xi;
            lower = lower.min(r);
            upper = upper.max(r);
        }
        if upper == 0.0 {
            return Ok(PerronPair {
                rho: 0.0,
                lower: 0.0,
                upper: 0.0,
                vector: x,
                iterations: iter,
            });
        }
        if upper - lower <= tol * upper {
            return Ok(PerronPair {
                rho: 0.5 * (lower + upper),
                lower,
                upper,
                vector: x,
                iterations: iter,
            });
        }
        let s = *shift.get_or_insert(upper);
        let mut norm = 0.0f64;
        for (xi, axi) in x.iter_mut().zip(&ax) {
            *xi = s * *xi + axi;
            norm = norm.max(*xi);
        }
        for xi in x.iter_mut() {
            *xi /= norm;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

/// Iterations of plain power iteration before [`perron_robust`] switches to
/// shift-invert.
pub const POWER_BUDGET: usize = 20_000;

/// Perron pair of a dense irreducible nonnegative matrix by shift-invert
/// iteration `x <- (σI - A)^{-1} x`, with `σ` kept just above the current
/// upper Collatz–Wielandt bound. Fast when the second eigenvalue is close
/// to the Perron root, which is where power iteration stalls.
pub fn perron_shift_invert(rows: &[Vec<f64>], tol: f64, max_iter: usize) -> Result<PerronPair> {
    let dim = rows.len();
    let a = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
    let mut x = DVector::from_element(dim, 1.0);
    for iter in 0..=max_iter {
        let ax = &a * &x;
        let (lower, upper) = x.iter().zip(ax.iter()).fold((f64::INFINITY, 0.0f64), |(lo, hi), (xi, axi)| {
            (lo.min(axi / xi), hi.max(axi / xi))
        });
        if upper == 0.0 || upper - lower <= tol * upper {
            return Ok(PerronPair {
                rho: 0.5 * (lower + upper),
                lower,
                upper,
                vector: x.iter().copied().collect(),
                iterations: iter,
            });
        }
        let sigma = upper + 0.5 * (upper - lower).max(tol * upper);
        let shifted = DMatrix::from_diagonal_element(dim, dim, sigma) - &a;
        let y = shifted.lu().solve(&x).ok_or(Error::NoConvergence { iterations: iter })?;
        let norm = y.amax();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NoConvergence { iterations: iter });
        }
        // Roundoff can leave negligible entries with the wrong sign.
        x = y.map(|v| (v / norm).abs().max(f64::MIN_POSITIVE));
    }
    Err(Error::NoConvergence { iterations: max_iter })
}

/// Power iteration for up to [`POWER_BUDGET`] steps, then shift-invert on
/// the dense matrix produced by `dense`.
pub fn perron_robust<F, D>(dim: usize, apply: F, dense: D, tol: f64, max_iter: usize) -> Result<PerronPair>
where
    F: Fn(&[f64], &mut [f64]),
    D: FnOnce() -> Vec<Vec<f64>>,
{
    match perron_iteration(dim, apply, tol, max_iter.min(POWER_BUDGET)) {
        Err(Error::NoConvergence { .. }) => perron_shift_invert(&dense(), tol, 200),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_ln3() {
        let (h, (lo, hi)) =
            bisect_decreasing(|h| 2.0 * inv_one_plus_exp(h) - 0.5, 1e-12, 1e-13).unwrap();
        assert!((h - 3f64.ln()).abs() < 1e-12);
        assert!(lo <= h && h <= hi);
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        assert!(bisect_decreasing(|h| -h, 1.0, 1e-10).is_err());
    }

    #[test]
    fn logistic_tail_is_stable() {
        assert!(inv_one_plus_exp(1000.0) >= 0.0);
        assert_eq!(inv_one_plus_exp(-1000.0), 1.0);
        assert!((inv_one_plus_exp(0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn perron_handles_periodic_matrix() {
        // 2-cycle permutation: period 2, radius 1.
        let pair = perron_iteration(
            2,
            |x, y| {
                y[0] = x[1];
                y[1] = x[0];
            },
            1e-13,
            1000,
        )
        .unwrap();
        assert!((pair.rho - 1.0).abs() < 1e-13);
    }

    #[test]
    fn perron_on_dense_matrix() {
        // [[2,1],[1,2]] has radius 3.
        let pair = perron_iteration(
            2,
            |x, y| {
                y[0] = 2.0 * x[0] + x[1];
                y[1] = x[0] + 2.0 * x[1];
            },
            1e-14,
            1000,
        )
        .unwrap();
        assert!((pair.rho - 3.0).abs() < 1e-12);
        assert!((pair.vector[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_invert_handles_nearly_decoupled_blocks() {
        let (a, b, d) = (1.0f64, 1e-9, 1.0 - 1e-6);
        let rows = vec![vec![a, b], vec![b, d]];
        let exact = 0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let apply = |x: &[f64], y: &mut [f64]| {
            y[0] = a * x[0] + b * x[1];
            y[1] = b * x[0] + d * x[1];
        };
        assert!(perron_iteration(2, apply, 1e-13, POWER_BUDGET).is_err());
        let pair = perron_robust(2, apply, || rows.clone(), 1e-13, 1_000_000).unwrap();
        assert!((pair.rho - exact).abs() < 1e-13);
        assert!(pair.vector[1] / pair.vector[0] < 1e-2);
    }

    #[test]
    fn shift_invert_matches_power_iteration() {
        let rows = vec![
            vec![0.0, 0.3, 0.7, 0.0],
            vec![0.2, 0.0, 0.0, 0.9],
            vec![0.0, 0.5, 0.0, 0.4],
            vec![1.1, 0.0, 0.1, 0.0],
        ];
        let apply = |x: &[f64], y: &mut [f64]| {
            for (yi, row) in y.iter_mut().zip(&rows) {
                *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
            }
        };
        let p = perron_iteration(4, apply, 1e-14, 100_000).unwrap();
        let q = perron_shift_invert(&rows, 1e-14, 200).unwrap();
        assert!((p.rho - q.rho).abs() < 1e-13);
        for (u, v) in p.vector.iter().zip(&q.vector) {
            assert!((u - v).abs() < 1e-10);
        }
    }
}
