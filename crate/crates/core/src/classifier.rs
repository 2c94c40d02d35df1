//! Image-set classification by per-class reconstruction error.
//!
//! Training fits one global auto-encoder on the whole gallery and then one
//! model per class, each initialized from the global weights. A probe
//! sample is assigned to the class whose model reconstructs it with the
//! smallest squared error; the set label is the majority vote.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::autoencoder::{train_delm_observed, DelmModel, LayerSpec, Refit, TrainObserver};
use crate::dataset::normalize::{NormalizationScope, NormalizationStats, DEFAULT_EPSILON};
use crate::elm::ActivationKind;
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// A collection of feature vectors sharing one (possibly unknown) label.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSet {
    pub set_id: String,
    pub label: Option<String>,
    pub features: FeatureMatrix,
}

impl ImageSet {
    pub fn new(set_id: impl Into<String>, label: Option<String>, features: FeatureMatrix) -> Self {
        Self {
            set_id: set_id.into(),
            label,
            features,
        }
    }

    pub fn labeled(
        set_id: impl Into<String>,
        label: impl Into<String>,
        features: FeatureMatrix,
    ) -> Self {
        Self::new(set_id, Some(label.into()), features)
    }

    pub fn len(&self) -> usize {
        self.features.samples()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }
}

/// Labeled training sets with a common feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Gallery {
    sets: Vec<ImageSet>,
}

impl Gallery {
    pub fn new(sets: Vec<ImageSet>) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Err(Error::EmptyGallery);
        };
        let d = first.dim();
        let mut ids = HashSet::new();
        for set in &sets {
            if set.label.is_none() {
                return Err(Error::InvalidParameter(format!(
                    "gallery set `{}` has no label",
                    set.set_id
                )));
            }
            if set.dim() != d {
                return Err(Error::shape(
                    "gallery set dimension",
                    d,
                    format!("{} (set `{}`)", set.dim(), set.set_id),
                ));
            }
            if !ids.insert(set.set_id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate set_id `{}`",
                    set.set_id
                )));
            }
        }
        Ok(Self { sets })
    }

    pub fn sets(&self) -> &[ImageSet] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<ImageSet> {
        self.sets
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    /// Total number of samples `N`.
    pub fn total_samples(&self) -> usize {
        self.sets.iter().map(ImageSet::len).sum()
    }

    /// Distinct labels in canonical (sorted) order.
    pub fn classes(&self) -> Vec<String> {
        self.sets
            .iter()
            .filter_map(|s| s.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Sets ordered by `set_id`, the order used for concatenation.
    fn canonical(&self) -> Vec<&ImageSet> {
        let mut sets: Vec<&ImageSet> = self.sets.iter().collect();
        sets.sort_by(|a, b| a.set_id.cmp(&b.set_id));
        sets
    }

    /// All samples, concatenated in canonical set order.
    pub fn concatenated(&self) -> Result<FeatureMatrix> {
        FeatureMatrix::concat(self.canonical().into_iter().map(|s| &s.features))
    }

    /// All samples of one class, concatenated in canonical set order.
    pub fn class_samples(&self, label: &str) -> Result<ImageSet> {
        let parts: Vec<&FeatureMatrix> = self
            .canonical()
            .into_iter()
            .filter(|s| s.label.as_deref() == Some(label))
            .map(|s| &s.features)
            .collect();
        if parts.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "no gallery sets for class `{label}`"
            )));
        }
        Ok(ImageSet::labeled(
            label,
            label,
            FeatureMatrix::concat(parts)?,
        ))
    }

    /// Applies fixed normalization statistics to every set.
    pub fn normalized(&self, stats: &NormalizationStats) -> Result<Self> {
        let sets = self
            .sets
            .iter()
            .map(|s| {
                Ok(ImageSet {
                    features: stats.apply(&s.features)?,
                    ..s.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sets })
    }
}

/// Architecture and regularization shared by the global and class models.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Hidden-layer widths; its length is the depth `h`.
    pub widths: Vec<usize>,
    /// Ridge tradeoff per weight matrix: `h` hidden entries, then the decoder.
    pub c_per_layer: Vec<f64>,
    pub seed: u64,
    pub activation: ActivationKind,
    pub normalization: NormalizationScope,
    pub epsilon: f64,
    /// How class models are derived from the global model.
    pub refit: Refit,
}

impl Default for TrainConfig {
    /// Two hidden layers of 20 nodes, `C = 10⁶` for hidden layers and
    /// `C = 10¹⁸` for the decoder.
    fn default() -> Self {
        Self::new(vec![20, 20], 1e6, 1e18, 0)
    }
}

impl TrainConfig {
    /// All hidden layers share `c_hidden`.
    pub fn new(widths: Vec<usize>, c_hidden: f64, c_final: f64, seed: u64) -> Self {
        let mut c_per_layer = vec![c_hidden; widths.len()];
        c_per_layer.push(c_final);
        Self {
            widths,
            c_per_layer,
            seed,
            activation: ActivationKind::Sigmoid,
            normalization: NormalizationScope::PerDimension,
            epsilon: DEFAULT_EPSILON,
            refit: Refit::AllLayers,
        }
    }

    pub fn hidden_layers(&self) -> usize {
        self.widths.len()
    }

    pub fn c_final(&self) -> f64 {
        *self.c_per_layer.last().expect("validated config")
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.widths.len();
        if h == 0 {
            return Err(Error::InvalidParameter("h must be >= 1".into()));
        }
        if self.widths.contains(&0) {
            return Err(Error::InvalidParameter("layer widths must be >= 1".into()));
        }
        if self.c_per_layer.len() != h + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} C values for h = {h}, got {}",
                h + 1,
                self.c_per_layer.len()
            )));
        }
        if let Some(c) = self
            .c_per_layer
            .iter()
            .find(|c| !(c.is_finite() && **c > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "C must be finite and > 0, got {c}"
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn layer_specs(&self) -> Vec<LayerSpec> {
        self.widths
            .iter()
            .zip(&self.c_per_layer)
            .enumerate()
            .map(|(i, (&width, &c))| LayerSpec {
                width,
                c,
                seed: self.seed.wrapping_add(i as u64),
            })
            .collect()
    }
}

/// Trains the global model on an already normalized gallery.
pub fn train_global(gallery: &Gallery, config: &TrainConfig) -> Result<DelmModel> {
    train_global_observed(gallery, config, &())
}

fn train_global_observed(
    gallery: &Gallery,
    config: &TrainConfig,
    observer: &dyn TrainObserver,
) -> Result<DelmModel> {
    config.validate()?;
    let x = gallery.concatenated()?;
    train_delm_observed(
        &x,
        &config.layer_specs(),
        config.c_final(),
        None,
        Refit::AllLayers,
        observer,
        "global",
    )
}

/// Trains one class model on its (normalized) samples, initialized from
/// the global model according to `config.refit`.
pub fn train_class_specific(
    global: &DelmModel,
    class_set: &ImageSet,
    config: &TrainConfig,
) -> Result<DelmModel> {
    train_class_observed(global, class_set, config, &())
}

fn train_class_observed(
    global: &DelmModel,
    class_set: &ImageSet,
    config: &TrainConfig,
    observer: &dyn TrainObserver,
) -> Result<DelmModel> {
    config.validate()?;
    if class_set.dim() != global.input_dim() {
        return Err(Error::shape(
            "class set dimension",
            global.input_dim(),
            class_set.dim(),
        ));
    }
    let tag = class_set.label.as_deref().unwrap_or(&class_set.set_id);
    let model = train_delm_observed(
        &class_set.features,
        &config.layer_specs(),
        config.c_final(),
        Some(global),
        config.refit,
        observer,
        tag,
    )?;
    model.with_feature_stats(global.feature_stats().cloned())
}

/// The global model plus one model per class, in canonical label order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModels {
    global: DelmModel,
    labels: Vec<String>,
    per_class: Vec<DelmModel>,
    config: TrainConfig,
}

impl ClassModels {
    /// Assembles trained models. Labels are re-sorted into canonical order.
    pub fn new(
        global: DelmModel,
        per_class: Vec<(String, DelmModel)>,
        config: TrainConfig,
    ) -> Result<Self> {
        let mut per_class = per_class;
        per_class.sort_by(|a, b| a.0.cmp(&b.0));
        if per_class.is_empty() {
            return Err(Error::InvalidParameter("no class models".into()));
        }
        if per_class.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("duplicate class label".into()));
        }
        for (label, m) in &per_class {
            if m.dims() != global.dims() || m.activation() != global.activation() {
                return Err(Error::shape(
                    "class model architecture",
                    format!("{:?}", global.dims()),
                    format!("{:?} (class `{label}`)", m.dims()),
                ));
            }
        }
        let (labels, per_class) = per_class.into_iter().unzip();
        Ok(Self {
            global,
            labels,
            per_class,
            config,
        })
    }

    pub fn global(&self) -> &DelmModel {
        &self.global
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn class_models(&self) -> impl Iterator<Item = (&str, &DelmModel)> {
        self.labels.iter().map(String::as_str).zip(&self.per_class)
    }

    pub fn get(&self, label: &str) -> Option<&DelmModel> {
        self.labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| &self.per_class[i])
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.global.input_dim()
    }

    pub fn feature_stats(&self) -> Option<&NormalizationStats> {
        self.global.feature_stats()
    }

    /// Total bytes of all weight matrices.
    pub fn weight_bytes(&self) -> usize {
        self.global.weight_bytes()
            + self
                .per_class
                .iter()
                .map(DelmModel::weight_bytes)
                .sum::<usize>()
    }

    /// Maps raw probe features into the training range using the stored
    /// statistics; returns the input unchanged when none are stored.
    pub fn normalize_probe(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.dim() != self.input_dim() {
            return Err(Error::shape(
                "probe dimension",
                format!("d = {}", self.input_dim()),
                format!("d = {}", x.dim()),
            ));
        }
        match self.feature_stats() {
            Some(stats) => stats.apply(x),
            None => Ok(x.clone()),
        }
    }

    /// `s × c` matrix of squared reconstruction errors of normalized samples.
    fn error_matrix(&self, x: &FeatureMatrix) -> Result<DMatrix<f64>> {
        let columns = self
            .per_class
            .par_iter()
            .map(|m| m.reconstruction_errors(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(x.samples(), columns.len(), |i, j| {
            columns[j][i]
        }))
    }
}

/// Fits the normalization statistics, the global model and every class model.
pub fn train_all(gallery: &Gallery, config: &TrainConfig) -> Result<ClassModels> {
    train_all_observed(gallery, config, &())
}

pub fn train_all_observed(
    gallery: &Gallery,
    config: &TrainConfig,
    observer: &dyn TrainObserver,
) -> Result<ClassModels> {
    config.validate()?;
    let classes = gallery.classes();
    if classes.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "classification needs at least 2 classes, gallery has {}",
            classes.len()
        )));
    }
    let stats = NormalizationStats::fit(
        &gallery.concatenated()?,
        config.normalization,
        config.epsilon,
    )?;
    let normalized = gallery.normalized(&stats)?;
    let global =
        train_global_observed(&normalized, config, observer)?.with_feature_stats(Some(stats))?;

    let per_class = classes
        .par_iter()
        .map(|label| {
            let set = normalized.class_samples(label)?;
            Ok((
                label.clone(),
                train_class_observed(&global, &set, config, observer)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ClassModels::new(global, per_class, config.clone())
}

/// Label and per-class errors of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleLabel {
    pub label: String,
    pub errors: Vec<f64>,
}

/// Classifies one raw feature vector.
pub fn classify_sample(x: &DVector<f64>, models: &ClassModels) -> Result<SampleLabel> {
    let m = FeatureMatrix::new(DMatrix::from_column_slice(x.len(), 1, x.as_slice()))?;
    let normalized = models.normalize_probe(&m)?;
    let errors: Vec<f64> = models
        .error_matrix(&normalized)?
        .row(0)
        .iter()
        .copied()
        .collect();
    Ok(SampleLabel {
        label: models.labels[argmin(&errors)].clone(),
        errors,
    })
}

/// Index of the smallest error; ties go to the lowest index.
pub fn argmin(errors: &[f64]) -> usize {
    let mut best = 0;
    for (j, e) in errors.iter().enumerate().skip(1) {
        if e.total_cmp(&errors[best]).is_lt() {
            best = j;
        }
    }
    best
}

/// Outcome of classifying one probe set.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPrediction {
    pub set_id: String,
    pub set_label: String,
    pub per_sample_labels: Vec<String>,
    /// `e(i, j)`: squared error of sample `i` under class `j`'s model.
    pub per_sample_errors: DMatrix<f64>,
    /// Column labels of `per_sample_errors`, canonical order.
    pub labels: Vec<String>,
    /// Votes per label; labels with no votes are listed with zero.
    pub vote_counts: BTreeMap<String, usize>,
}

impl SetPrediction {
    /// Derives per-sample labels and the set label from an error matrix.
    ///
    /// Each row is labeled by its argmin. The set label is the most voted
    /// label; count ties go to the label with the smallest error summed
    /// over the samples that voted for it, then to canonical order. Sums
    /// within a relative 1e-12 count as equal, so rescaling every error
    /// cannot flip a tie through rounding.
    pub fn from_errors(
        set_id: impl Into<String>,
        errors: DMatrix<f64>,
        labels: &[String],
    ) -> Result<Self> {
        if errors.ncols() != labels.len() || labels.is_empty() {
            return Err(Error::shape(
                "error matrix columns",
                labels.len(),
                errors.ncols(),
            ));
        }
        if errors.nrows() == 0 {
            return Err(Error::EmptySet(set_id.into()));
        }
        let c = labels.len();
        let mut counts = vec![0usize; c];
        let mut evidence = vec![0.0f64; c];
        let mut per_sample = Vec::with_capacity(errors.nrows());
        for row in errors.row_iter() {
            let row: Vec<f64> = row.iter().copied().collect();
            let j = argmin(&row);
            counts[j] += 1;
            evidence[j] += row[j];
            per_sample.push(labels[j].clone());
        }
        let mut winner = 0;
        for j in 1..c {
            let better = counts[j] > counts[winner]
                || (counts[j] == counts[winner] && clearly_less(evidence[j], evidence[winner]));
            if better {
                winner = j;
            }
        }
        Ok(Self {
            set_id: set_id.into(),
            set_label: labels[winner].clone(),
            per_sample_labels: per_sample,
            per_sample_errors: errors,
            labels: labels.to_vec(),
            vote_counts: labels.iter().cloned().zip(counts).collect(),
        })
    }

    /// Sum of each class's errors over all samples, in `labels` order.
    pub fn class_error_totals(&self) -> Vec<f64> {
        self.per_sample_errors.row_sum().iter().copied().collect()
    }
}

fn clearly_less(a: f64, b: f64) -> bool {
    a < b && b - a > 1e-12 * a.abs().max(b.abs())
}

/// Labels every sample of the probe, then takes the majority vote.
pub fn classify_set(probe: &ImageSet, models: &ClassModels) -> Result<SetPrediction> {
    if probe.is_empty() {
        return Err(Error::EmptySet(probe.set_id.clone()));
    }
    let normalized = models.normalize_probe(&probe.features)?;
    let errors = models.error_matrix(&normalized)?;
    SetPrediction::from_errors(probe.set_id.clone(), errors, &models.labels)
}
