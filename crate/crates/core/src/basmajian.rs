//! Boundary-length bounds in terms of an orthospectrum and an entropy.

use serde::{Deserialize, Serialize};

use crate::chord::ChordDiagram;
use crate::error::{Error, Result};
use crate::numeric::inv_one_plus_exp;

/// A finite (truncated) multiset of orthogeodesic lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orthospectrum {
    lengths: Vec<f64>,
}

impl Orthospectrum {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if let Some(l) = lengths.iter().find(|l| !l.is_finite() || **l <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "orthospectrum length {l} must be positive"
            )));
        }
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    fn logistic_sum(&self, h: f64) -> f64 {
        self.lengths.iter().map(|&l| inv_one_plus_exp(h * l)).sum()
    }
}

/// `lower < middle < upper` with absolute slacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
    pub strict_lower: bool,
    pub strict_upper: bool,
}

impl InequalityReport {
    pub fn new(lower: f64, middle: f64, upper: f64) -> Self {
        Self {
            lower,
            middle,
            upper,
            slack_lower: middle - lower,
            slack_upper: upper - middle,
            strict_lower: lower < middle,
            strict_upper: middle < upper,
        }
    }

    pub fn strict(&self) -> bool {
        self.strict_lower && self.strict_upper
    }

    pub fn min_slack(&self) -> f64 {
        self.slack_lower.min(self.slack_upper)
    }
}

/// `tanh(hL/2)`, `2 Σ 1/(1+e^{hℓ_i})` and `sinh(hL/2)` for a chord graph
/// with circle length `L` and chord lengths `ℓ_i`. Violations are reported,
/// not raised.
pub fn graph_bounds(cd: &ChordDiagram, h: f64) -> InequalityReport {
    let half = 0.5 * h * cd.circle_length();
    let middle = 2.0 * cd.chords().iter().map(|&l| inv_one_plus_exp(h * l)).sum::<f64>();
    InequalityReport::new(half.tanh(), middle, half.sinh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `(2/h) arcsinh(Σ 1/(1+e^{hℓ}))`.
    Theorem1,
    /// `(2/h) arcsinh(2 Σ 1/(1+e^{hℓ}))`, the sharper form carried over
    /// directly from the graph inequality.
    EqBasm,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 2] = [BoundVariant::Theorem1, BoundVariant::EqBasm];

    fn factor(self) -> f64 {
        match self {
            BoundVariant::Theorem1 => 1.0,
            BoundVariant::EqBasm => 2.0,
        }
    }
}

/// Lower bound on the boundary length given the orthospectrum and the
/// entropy of the doubled surface.
pub fn surface_lower_bound(os: &Orthospectrum, h: f64, variant: BoundVariant) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("h = {h} must be positive")));
    }
    Ok(2.0 / h * (variant.factor() * os.logistic_sum(h)).asinh())
}

/// `2 Σ log coth(ℓ/2)`, the hyperbolic boundary length for the (truncated)
/// orthospectrum.
pub fn hyperbolic_boundary_length(os: &Orthospectrum) -> f64 {
    // log coth(x/2) = log((1 + e^{-x}) / (1 - e^{-x}))
    2.0 * os
        .lengths
        .iter()
        .map(|&l| {
            let t = (-l).exp();
            t.ln_1p() - (-t).ln_1p()
        })
        .sum::<f64>()
}

/// Bounds at `h1 <= h2` for one variant; the first is never smaller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonePair {
    pub variant: BoundVariant,
    pub at_h1: f64,
    pub at_h2: f64,
}

impl MonotonePair {
    pub fn holds(&self) -> bool {
        self.at_h1 >= self.at_h2
    }
}

pub fn bound_monotone_in_h(os: &Orthospectrum, h1: f64, h2: f64) -> Result<[MonotonePair; 2]> {
    if h1 > h2 {
        return Err(Error::InvalidArgument(format!("need h1 <= h2, got {h1} > {h2}")));
    }
    let pair = |variant| -> Result<MonotonePair> {
        Ok(MonotonePair {
            variant,
            at_h1: surface_lower_bound(os, h1, variant)?,
            at_h2: surface_lower_bound(os, h2, variant)?,
        })
    };
    Ok([pair(BoundVariant::Theorem1)?, pair(BoundVariant::EqBasm)?])
}
