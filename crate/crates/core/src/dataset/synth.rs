//! Seeded synthetic galleries for tests, examples and benchmarks.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::classifier::{Gallery, ImageSet};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

const MEAN_ATTEMPTS: usize = 1000;
/// Radius of the per-class curves around their centers.
const CURVE_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    /// Isotropic Gaussian around a per-class mean.
    GaussianBlob,
    /// A closed per-class curve `t ↦ μ + r·u(t)`, `u_i(t) ∝ sin(f_i t + φ_i)`.
    SinusoidalManifold,
}

impl std::str::FromStr for Manifold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blob" | "gaussian" | "gaussianblob" => Ok(Manifold::GaussianBlob),
            "sine" | "sinusoidal" | "sinusoidalmanifold" => Ok(Manifold::SinusoidalManifold),
            other => Err(Error::InvalidParameter(format!(
                "unknown manifold `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub classes: usize,
    pub sets_per_class: usize,
    pub samples_per_set: usize,
    pub dim: usize,
    pub manifold: Manifold,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            classes: 5,
            sets_per_class: 4,
            samples_per_set: 20,
            dim: 50,
            manifold: Manifold::GaussianBlob,
            noise_sigma: 0.05,
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("classes", self.classes),
            ("sets_per_class", self.sets_per_class),
            ("samples_per_set", self.samples_per_set),
            ("dim", self.dim),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidParameter(format!("{name} must be >= 1")));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Class label for index `k`, zero-padded so lexical order is numeric order.
pub fn class_label(k: usize, classes: usize) -> String {
    let width = classes.saturating_sub(1).max(1).to_string().len();
    format!("class{k:0width$}")
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
        let n: f64 = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Unit-sphere class centers whose pairwise distances exceed `6σ` when
/// that is attainable within the attempt budget.
fn class_centers(rng: &mut ChaCha8Rng, c: usize, d: usize, sigma: f64) -> Vec<DVector<f64>> {
    let min_gap = 6.0 * sigma;
    let mut centers: Vec<DVector<f64>> = Vec::with_capacity(c);
    for _ in 0..c {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for _ in 0..MEAN_ATTEMPTS {
            let cand = random_unit(rng, d);
            let gap = centers
                .iter()
                .map(|m| (m - &cand).norm())
                .fold(f64::INFINITY, f64::min);
            if gap > min_gap && gap > 0.0 {
                best = Some((gap, cand));
                break;
            }
            if best.as_ref().is_none_or(|(g, _)| gap > *g) {
                best = Some((gap, cand));
            }
        }
        centers.push(best.expect("at least one attempt").1);
    }
    centers
}

/// Generates `classes × sets_per_class` labeled sets.
pub fn synth_generate(params: &SynthParams) -> Result<Gallery> {
    params.validate()?;
    let SynthParams {
        classes: c,
        sets_per_class,
        samples_per_set: s,
        dim: d,
        manifold,
        noise_sigma: sigma,
        seed,
    } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let centers = class_centers(&mut rng, c, d, sigma);
    let amplitude = CURVE_RADIUS * (2.0 / d as f64).sqrt();

    let set_width = sets_per_class.saturating_sub(1).max(1).to_string().len();
    let mut sets = Vec::with_capacity(c * sets_per_class);
    for (k, center) in centers.iter().enumerate() {
        let label = class_label(k, c);
        let curve: Option<(Vec<f64>, Vec<f64>)> = match manifold {
            Manifold::GaussianBlob => None,
            Manifold::SinusoidalManifold => Some((
                (0..d).map(|_| rng.gen_range(1..=3) as f64).collect(),
                (0..d).map(|_| rng.gen_range(0.0..TAU)).collect(),
            )),
        };
        for m in 0..sets_per_class {
            let mut data = DMatrix::zeros(d, s);
            for mut col in data.column_iter_mut() {
                let t = match curve {
                    Some(_) => rng.gen_range(0.0..TAU),
                    None => 0.0,
                };
                for i in 0..d {
                    let base = match &curve {
                        Some((freq, phase)) => {
                            center[i] + amplitude * (freq[i] * t + phase[i]).sin()
                        }
                        None => center[i],
                    };
                    col[i] = base + noise.sample(&mut rng);
                }
            }
            let set_id = format!("{label}_set{m:0set_width$}");
            sets.push(ImageSet::labeled(
                set_id,
                label.clone(),
                FeatureMatrix::new(data)?,
            ));
        }
    }
    Gallery::new(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(sigma: f64) -> SynthParams {
        SynthParams {
            classes: 2,
            sets_per_class: 1,
            samples_per_set: 10,
            dim: 3,
            manifold: Manifold::GaussianBlob,
            noise_sigma: sigma,
            seed: 1,
        }
    }

    #[test]
    fn counts_match_params() {
        let g = synth_generate(&blob(0.1)).unwrap();
        assert_eq!(g.sets().len(), 2);
        assert_eq!(g.total_samples(), 20);
        assert_eq!(g.classes(), vec!["class0", "class1"]);
    }

    #[test]
    fn zero_noise_sets_are_constant() {
        let g = synth_generate(&blob(0.0)).unwrap();
        for set in g.sets() {
            let m = set.features.as_matrix();
            for j in 1..m.ncols() {
                assert_eq!(m.column(j), m.column(0));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for manifold in [Manifold::GaussianBlob, Manifold::SinusoidalManifold] {
            let p = SynthParams {
                manifold,
                ..SynthParams::default()
            };
            assert_eq!(synth_generate(&p).unwrap(), synth_generate(&p).unwrap());
        }
    }

    #[test]
    fn class_means_are_separated() {
        for c in [2, 5, 10] {
            for sigma in [0.01, 0.05, 0.1] {
                for seed in 0..5 {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let centers = class_centers(&mut rng, c, 3, sigma);
                    for a in 0..c {
                        for b in a + 1..c {
                            assert!((&centers[a] - &centers[b]).norm() > 6.0 * sigma);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(synth_generate(&SynthParams {
            classes: 0,
            ..blob(0.1)
        })
        .is_err());
        assert!(synth_generate(&SynthParams {
            noise_sigma: -1.0,
            ..blob(0.1)
        })
        .is_err());
    }

    #[test]
    fn labels_sort_numerically() {
        assert_eq!(class_label(3, 12), "class03");
        assert_eq!(class_label(0, 1), "class0");
        assert!(class_label(9, 12) < class_label(10, 12));
    }
}
