//! Feature ingestion, normalization, synthetic galleries and on-disk formats.

pub mod format;
pub mod manifest;
pub mod normalize;
pub mod synth;

pub use format::{
    load_class_models, load_model, read_features, save_class_models, save_model, write_features,
};
pub use manifest::{
    load_gallery, load_sets, save_gallery, save_sets, GalleryManifest, ManifestEntry,
};
pub use normalize::{normalize_features, NormalizationScope, NormalizationStats, DEFAULT_EPSILON};
pub use synth::{synth_generate, Manifold, SynthParams};
