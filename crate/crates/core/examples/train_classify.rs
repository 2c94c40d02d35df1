//! Train a global model and one model per class, then label probe sets by
//! per-sample reconstruction error and majority vote.

use delm::classifier::{classify_set, train_all, TrainConfig};
use delm::dataset::{synth_generate, Manifold, SynthParams};
use delm::harness::{split_fold, GalleryRule};

fn main() -> delm::Result<()> {
    let data = synth_generate(&SynthParams {
        manifold: Manifold::SinusoidalManifold,
        noise_sigma: 0.02,
        seed: 11,
        ..SynthParams::default()
    })?;
    let (gallery, probes) = split_fold(&data, GalleryRule::Half, 11, 0)?;
    let config = TrainConfig::default();
    let models = train_all(&gallery, &config)?;
    println!(
        "{} class models over d = {}, widths {:?}",
        models.labels().len(),
        models.input_dim(),
        config.widths
    );

    let mut correct = 0;
    for probe in &probes {
        let p = classify_set(probe, &models)?;
        let truth = probe.label.as_deref().unwrap_or("?");
        correct += usize::from(truth == p.set_label);
        let winner = p.vote_counts[&p.set_label];
        println!(
            "{:<14} truth {truth:<7} predicted {:<7} ({winner}/{} votes)",
            p.set_id,
            p.set_label,
            probe.len()
        );
    }
    println!("set accuracy: {correct}/{}", probes.len());
    Ok(())
}
