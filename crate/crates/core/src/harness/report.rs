use std::fmt::Write as _;

use super::ProtocolSpec;
use crate::classifier::TrainConfig;

/// Aggregated outcome of an evaluation or benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Set-level recognition rate (%) of each fold.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Population standard deviation of `fold_accuracies`.
    pub std_accuracy: f64,
    /// Mean wall-clock training time per fold, seconds.
    pub train_seconds: f64,
    /// Mean wall-clock time to classify one probe set, seconds.
    pub test_seconds: f64,
    /// Allocation-accounting estimate of peak training memory, bytes.
    pub peak_memory_bytes: usize,
    pub classes: usize,
    pub dim: usize,
    pub probe_sets: usize,
    /// Largest set (gallery or probe) after subsampling and noise.
    pub max_set_size: usize,
    /// Samples appended to each corrupted set (`c − 1`), if any.
    pub noise_growth: Option<usize>,
    pub protocol: ProtocolSpec,
    pub config: TrainConfig,
}

impl RunReport {
    pub(crate) fn summarize(accuracies: &[f64]) -> (f64, f64) {
        if accuracies.is_empty() {
            return (f64::NAN, f64::NAN);
        }
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let var = accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    fn config_pairs(&self) -> Vec<(&'static str, String)> {
        let c = &self.config;
        let p = &self.protocol;
        vec![
            ("seed", c.seed.to_string()),
            ("hidden_layers", c.hidden_layers().to_string()),
            ("widths", join(&c.widths)),
            (
                "c_per_layer",
                join(
                    &c.c_per_layer
                        .iter()
                        .map(|v| format!("{v:e}"))
                        .collect::<Vec<_>>(),
                ),
            ),
            ("activation", c.activation.name().to_string()),
            ("refit", c.refit.name().to_string()),
            ("epsilon", format!("{:e}", c.epsilon)),
            ("folds", p.folds.to_string()),
            ("split", p.split_name()),
            ("protocol_seed", p.seed.to_string()),
            ("noise_mode", p.noise.name().to_string()),
            ("nr", p.n_r.map_or("all".into(), |n| n.to_string())),
        ]
    }

    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "DELM run report");
        let _ = writeln!(out, "configuration:");
        for (k, v) in self.config_pairs() {
            let _ = writeln!(out, "  {k:<14} {v}");
        }
        let _ = writeln!(
            out,
            "data: {} classes, d = {}, {} probe sets",
            self.classes, self.dim, self.probe_sets
        );
        let _ = writeln!(out, "largest evaluated set: {} samples", self.max_set_size);
        if let Some(g) = self.noise_growth {
            let _ = writeln!(
                out,
                "noise: every corrupted set grew by {g} samples (c - 1)"
            );
        }
        for (i, a) in self.fold_accuracies.iter().enumerate() {
            let _ = writeln!(out, "fold {i}: {a:.2}%");
        }
        if self.fold_accuracies.is_empty() {
            let _ = writeln!(out, "accuracy: n/a (unlabeled probes)");
        } else {
            let _ = writeln!(
                out,
                "accuracy: {:.2} ± {:.2}%",
                self.mean_accuracy, self.std_accuracy
            );
        }
        let _ = writeln!(out, "train time: {:.2} s", self.train_seconds);
        let _ = writeln!(out, "test time per probe set: {:.4} s", self.test_seconds);
        let _ = writeln!(
            out,
            "training memory (estimate): {:.2} MB",
            self.peak_memory_bytes as f64 / (1024.0 * 1024.0)
        );
        out
    }

    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.config_pairs() {
            let _ = writeln!(out, "{k}={v}");
        }
        let _ = writeln!(out, "classes={}", self.classes);
        let _ = writeln!(out, "dim={}", self.dim);
        let _ = writeln!(out, "probe_sets={}", self.probe_sets);
        let _ = writeln!(out, "max_set_size={}", self.max_set_size);
        if let Some(g) = self.noise_growth {
            let _ = writeln!(out, "noise_growth={g}");
        }
        for (i, a) in self.fold_accuracies.iter().enumerate() {
            let _ = writeln!(out, "fold{i}_accuracy={a}");
        }
        let _ = writeln!(out, "mean_accuracy={}", self.mean_accuracy);
        let _ = writeln!(out, "std_accuracy={}", self.std_accuracy);
        let _ = writeln!(out, "train_seconds={}", self.train_seconds);
        let _ = writeln!(out, "test_seconds={}", self.test_seconds);
        let _ = writeln!(out, "peak_memory_bytes={}", self.peak_memory_bytes);
        out
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}
