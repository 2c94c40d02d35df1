//! Min-max scaling into the sigmoid's codomain.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// Default clamp margin, shared with the auto-encoder's logit targets.
pub const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizationScope {
    #[default]
    PerDimension,
    /// One min/max pair over all entries.
    Global,
}

impl NormalizationScope {
    pub fn tag(self) -> u8 {
        match self {
            NormalizationScope::PerDimension => 0,
            NormalizationScope::Global => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(NormalizationScope::PerDimension),
            1 => Some(NormalizationScope::Global),
            _ => None,
        }
    }
}

/// Affine map `x ↦ ε + (x − min)/(max − min)·(1 − 2ε)`, clamped to `[ε, 1 − ε]`.
///
/// `min`/`max` are stored per dimension even for [`NormalizationScope::Global`].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationStats {
    scope: NormalizationScope,
    min: Vec<f64>,
    max: Vec<f64>,
    epsilon: f64,
}

impl NormalizationStats {
    pub fn new(
        scope: NormalizationScope,
        min: Vec<f64>,
        max: Vec<f64>,
        epsilon: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 0.5), got {epsilon}"
            )));
        }
        if min.is_empty() || min.len() != max.len() {
            return Err(Error::shape("NormalizationStats", min.len(), max.len()));
        }
        for (i, (lo, hi)) in min.iter().zip(&max).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || hi < lo {
                return Err(Error::InvalidParameter(format!(
                    "dimension {i}: invalid range [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            scope,
            min,
            max,
            epsilon,
        })
    }

    /// Computes train-time statistics from `x`.
    pub fn fit(x: &FeatureMatrix, scope: NormalizationScope, epsilon: f64) -> Result<Self> {
        let m = x.as_matrix();
        let (min, max) = match scope {
            NormalizationScope::PerDimension => m.row_iter().map(|r| (r.min(), r.max())).unzip(),
            NormalizationScope::Global => (vec![m.min(); m.nrows()], vec![m.max(); m.nrows()]),
        };
        Self::new(scope, min, max, epsilon)
    }

    pub fn scope(&self) -> NormalizationScope {
        self.scope
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn apply(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.dim() != self.dim() {
            return Err(Error::shape(
                "normalize_features",
                format!("d = {}", self.dim()),
                format!("d = {}", x.dim()),
            ));
        }
        let eps = self.epsilon;
        let span = 1.0 - 2.0 * eps;
        let m = x.as_matrix();
        let out = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            let (lo, hi) = (self.min[i], self.max[i]);
            if hi == lo {
                0.5
            } else {
                (eps + (m[(i, j)] - lo) / (hi - lo) * span).clamp(eps, 1.0 - eps)
            }
        });
        FeatureMatrix::new(out)
    }
}

/// Normalizes `x` with `stats` when given (probe time), otherwise fits
/// per-dimension statistics on `x` first (train time).
pub fn normalize_features(
    x: &FeatureMatrix,
    stats: Option<&NormalizationStats>,
) -> Result<(FeatureMatrix, NormalizationStats)> {
    let stats = match stats {
        Some(s) => s.clone(),
        None => NormalizationStats::fit(x, NormalizationScope::PerDimension, DEFAULT_EPSILON)?,
    };
    let y = stats.apply(x)?;
    Ok((y, stats))
}
