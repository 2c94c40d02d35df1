//! Evaluation protocols: repeated gallery/probe splits, noise and
//! set-size robustness, and timing/memory measurement.

mod protocol;
mod report;

pub use protocol::{inject_noise, split_fold, subsample, subsample_sets, GalleryRule, NoiseMode};
pub use report::RunReport;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::autoencoder::{SolveEvent, TrainObserver};
use crate::classifier::{
    classify_set, train_all_observed, Gallery, ImageSet, SetPrediction, TrainConfig,
};
use crate::error::{Error, Result};

/// Evaluation protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub folds: usize,
    pub split: GalleryRule,
    pub seed: u64,
    pub noise: NoiseMode,
    /// Per-set sample cap.
    pub n_r: Option<usize>,
}

impl Default for ProtocolSpec {
    fn default() -> Self {
        Self {
            folds: 10,
            split: GalleryRule::Half,
            seed: 0,
            noise: NoiseMode::Nc,
            n_r: None,
        }
    }
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        if self.folds == 0 {
            return Err(Error::InvalidParameter("folds must be >= 1".into()));
        }
        if self.n_r == Some(0) {
            return Err(Error::InvalidParameter("N_r must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn split_name(&self) -> String {
        match self.split {
            GalleryRule::Half => "half".into(),
            GalleryRule::Count(k) => format!("count:{k}"),
        }
    }
}

/// Tracks the largest per-solve working set.
#[derive(Default)]
struct MemoryMeter {
    peak_solve: AtomicUsize,
}

impl TrainObserver for MemoryMeter {
    fn on_solve(&self, _: &str, event: &SolveEvent<'_>) {
        self.peak_solve
            .fetch_max(event.working_bytes, Ordering::Relaxed);
    }
}

const F64: usize = std::mem::size_of::<f64>();

struct Measured {
    predictions: Vec<SetPrediction>,
    train_seconds: f64,
    test_seconds: f64,
    peak_memory_bytes: usize,
}

fn train_and_test(
    gallery: &Gallery,
    probes: &[ImageSet],
    config: &TrainConfig,
) -> Result<Measured> {
    let meter = MemoryMeter::default();
    let start = Instant::now();
    let models = train_all_observed(gallery, config, &meter)?;
    let train_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let predictions = probes
        .iter()
        .map(|p| classify_set(p, &models))
        .collect::<Result<Vec<_>>>()?;
    let test_seconds = start.elapsed().as_secs_f64() / probes.len().max(1) as f64;

    // raw + normalized gallery copies, the concatenated training matrix,
    // the largest solve, and every trained model
    let data_bytes = 3 * gallery.dim() * gallery.total_samples() * F64;
    let peak_memory_bytes = data_bytes + meter.peak_solve.into_inner() + models.weight_bytes();
    Ok(Measured {
        predictions,
        train_seconds,
        test_seconds,
        peak_memory_bytes,
    })
}

fn accuracy(probes: &[ImageSet], predictions: &[SetPrediction]) -> Option<f64> {
    let labeled: Vec<bool> = probes
        .iter()
        .zip(predictions)
        .filter_map(|(p, pred)| p.label.as_ref().map(|l| *l == pred.set_label))
        .collect();
    if labeled.is_empty() {
        return None;
    }
    Some(100.0 * labeled.iter().filter(|&&ok| ok).count() as f64 / labeled.len() as f64)
}

fn max_set_size(gallery: &Gallery, probes: &[ImageSet]) -> usize {
    gallery
        .sets()
        .iter()
        .chain(probes)
        .map(ImageSet::len)
        .max()
        .unwrap_or(0)
}

/// Applies subsampling and then noise to one fold's partitions.
fn prepare_fold(
    gallery: &Gallery,
    probes: Vec<ImageSet>,
    spec: &ProtocolSpec,
    fold: u64,
) -> Result<(Gallery, Vec<ImageSet>)> {
    let stage_seed = spec
        .seed
        .wrapping_add(fold.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let (gallery, probes) = match spec.n_r {
        Some(n_r) => subsample(gallery, &probes, n_r, stage_seed)?,
        None => (gallery.clone(), probes),
    };
    inject_noise(&gallery, &probes, spec.noise, stage_seed ^ 1)
}

/// Runs `spec.folds` gallery/probe splits and aggregates set-level accuracy.
pub fn run_kfold(
    gallery: &Gallery,
    spec: &ProtocolSpec,
    config: &TrainConfig,
) -> Result<RunReport> {
    spec.validate()?;
    config.validate()?;
    let classes = gallery.classes().len();
    let mut accuracies = Vec::with_capacity(spec.folds);
    let (mut train_total, mut test_total, mut peak, mut probe_sets, mut max_size) =
        (0.0, 0.0, 0, 0, 0);
    for fold in 0..spec.folds as u64 {
        let (train, probes) = split_fold(gallery, spec.split, spec.seed, fold)?;
        let (train, probes) = prepare_fold(&train, probes, spec, fold)?;
        max_size = max_size.max(max_set_size(&train, &probes));
        let m = train_and_test(&train, &probes, config)?;
        accuracies.push(accuracy(&probes, &m.predictions).unwrap_or(0.0));
        train_total += m.train_seconds;
        test_total += m.test_seconds;
        peak = peak.max(m.peak_memory_bytes);
        probe_sets += probes.len();
    }
    let (mean, std) = RunReport::summarize(&accuracies);
    let folds = spec.folds as f64;
    Ok(RunReport {
        fold_accuracies: accuracies,
        mean_accuracy: mean,
        std_accuracy: std,
        train_seconds: train_total / folds,
        test_seconds: test_total / folds,
        peak_memory_bytes: peak,
        classes,
        dim: gallery.dim(),
        probe_sets,
        max_set_size: max_size,
        noise_growth: (spec.noise != NoiseMode::Nc).then(|| classes.saturating_sub(1)),
        protocol: spec.clone(),
        config: config.clone(),
    })
}

/// Times one training run and the classification of every probe.
pub fn measure_run(
    gallery: &Gallery,
    probes: &[ImageSet],
    config: &TrainConfig,
) -> Result<RunReport> {
    config.validate()?;
    let m = train_and_test(gallery, probes, config)?;
    let fold_accuracies: Vec<f64> = accuracy(probes, &m.predictions).into_iter().collect();
    let (mean, std) = RunReport::summarize(&fold_accuracies);
    Ok(RunReport {
        fold_accuracies,
        mean_accuracy: mean,
        std_accuracy: std,
        train_seconds: m.train_seconds,
        test_seconds: m.test_seconds,
        peak_memory_bytes: m.peak_memory_bytes,
        classes: gallery.classes().len(),
        dim: gallery.dim(),
        probe_sets: probes.len(),
        max_set_size: max_set_size(gallery, probes),
        noise_growth: None,
        protocol: ProtocolSpec {
            folds: 1,
            ..ProtocolSpec::default()
        },
        config: config.clone(),
    })
}
