//! Write a gallery to disk, train from its manifest, save the models, and
//! check that a reloaded copy predicts identically.

use delm::classifier::{classify_set, train_all, TrainConfig};
use delm::dataset::{
    load_class_models, load_gallery, save_class_models, save_gallery, synth_generate,
};
use delm::dataset::{GalleryManifest, SynthParams};

fn main() -> delm::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| delm::Error::Io {
        path: "<tempdir>".into(),
        source: e,
    })?;
    let manifest_path = save_gallery(
        &synth_generate(&SynthParams::default())?,
        dir.path(),
        "gallery.tsv",
    )?;
    println!(
        "{}",
        std::fs::read_to_string(&manifest_path)
            .unwrap()
            .lines()
            .take(3)
            .collect::<Vec<_>>()
            .join("\n")
    );

    let gallery = load_gallery(&GalleryManifest::read(&manifest_path)?)?;
    let models = train_all(&gallery, &TrainConfig::default())?;
    let model_path = dir.path().join("models.dlmc");
    save_class_models(&model_path, &models)?;
    let reloaded = load_class_models(&model_path)?;
    println!(
        "saved {} bytes; reloaded models equal: {}",
        std::fs::metadata(&model_path).map(|m| m.len()).unwrap_or(0),
        reloaded == models
    );

    let probe = &gallery.sets()[0];
    let before = classify_set(probe, &models)?;
    let after = classify_set(probe, &reloaded)?;
    println!(
        "{} -> {} / {} (identical: {})",
        probe.set_id,
        before.set_label,
        after.set_label,
        before == after
    );
    Ok(())
}
