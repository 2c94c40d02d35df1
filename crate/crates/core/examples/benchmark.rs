//! Training/testing time and a training-memory estimate as layer width
//! grows.

use delm::classifier::TrainConfig;
use delm::dataset::{synth_generate, SynthParams};
use delm::harness::{measure_run, split_fold, GalleryRule};

fn main() -> delm::Result<()> {
    let data = synth_generate(&SynthParams {
        classes: 10,
        sets_per_class: 6,
        samples_per_set: 40,
        dim: 100,
        ..SynthParams::default()
    })?;
    let (gallery, probes) = split_fold(&data, GalleryRule::Half, 0, 0)?;
    println!(
        "gallery: {} samples, d = {}",
        gallery.total_samples(),
        gallery.dim()
    );
    println!(
        "{:>8}{:>12}{:>16}{:>12}{:>10}",
        "width", "train (s)", "test/set (s)", "memory MB", "accuracy"
    );
    for width in [20, 50, 150, 400] {
        let config = TrainConfig::new(vec![width, width], 1e6, 1e18, 0);
        let r = measure_run(&gallery, &probes, &config)?;
        println!(
            "{width:>8}{:>12.3}{:>16.5}{:>12.2}{:>9.1}%",
            r.train_seconds,
            r.test_seconds,
            r.peak_memory_bytes as f64 / (1024.0 * 1024.0),
            r.mean_accuracy
        );
    }
    Ok(())
}
