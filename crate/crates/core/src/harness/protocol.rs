//! Gallery/probe splitting and the robustness corruptions.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::{Gallery, ImageSet};
use crate::error::{Error, Result};
use crate::matrix::FeatureMatrix;

/// Which partitions receive foreign samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Clean.
    #[default]
    Nc,
    /// Gallery only.
    Ng,
    /// Probes only.
    Np,
    /// Gallery and probes.
    Ngp,
}

impl NoiseMode {
    pub fn corrupts_gallery(self) -> bool {
        matches!(self, NoiseMode::Ng | NoiseMode::Ngp)
    }

    pub fn corrupts_probes(self) -> bool {
        matches!(self, NoiseMode::Np | NoiseMode::Ngp)
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::Nc => "nc",
            NoiseMode::Ng => "ng",
            NoiseMode::Np => "np",
            NoiseMode::Ngp => "ngp",
        }
    }
}

impl std::str::FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nc" => Ok(NoiseMode::Nc),
            "ng" => Ok(NoiseMode::Ng),
            "np" => Ok(NoiseMode::Np),
            "ngp" | "ng+p" => Ok(NoiseMode::Ngp),
            other => Err(Error::InvalidParameter(format!(
                "unknown noise mode `{other}` (nc, ng, np, ngp)"
            ))),
        }
    }
}

/// How many sets of each class go to the gallery in a fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GalleryRule {
    /// `⌊n/2⌋` of a class's `n` sets.
    #[default]
    Half,
    /// A fixed number per class.
    Count(usize),
}

impl GalleryRule {
    fn gallery_size(self, n: usize) -> usize {
        match self {
            GalleryRule::Half => n / 2,
            GalleryRule::Count(k) => k,
        }
    }
}

/// Splits the sets of each class into gallery and probe sets.
///
/// Each fold reshuffles every class with its own ChaCha stream, so folds
/// are different gallery/probe combinations of the same sets.
pub fn split_fold(
    gallery: &Gallery,
    rule: GalleryRule,
    seed: u64,
    fold: u64,
) -> Result<(Gallery, Vec<ImageSet>)> {
    let mut by_class: BTreeMap<&str, Vec<&ImageSet>> = BTreeMap::new();
    for set in gallery.sets() {
        by_class
            .entry(set.label.as_deref().unwrap_or_default())
            .or_default()
            .push(set);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fold);

    let mut train = Vec::new();
    let mut probes = Vec::new();
    for (label, mut sets) in by_class {
        let n = sets.len();
        let g = rule.gallery_size(n);
        if n < 2 || g == 0 || g >= n {
            return Err(Error::Protocol(format!(
                "class `{label}` has {n} set(s); the split needs at least one gallery and one probe set"
            )));
        }
        sets.sort_by(|a, b| a.set_id.cmp(&b.set_id));
        for i in (1..n).rev() {
            sets.swap(i, rng.gen_range(0..=i));
        }
        train.extend(sets[..g].iter().map(|s| (*s).clone()));
        probes.extend(sets[g..].iter().map(|s| (*s).clone()));
    }
    Ok((Gallery::new(train)?, probes))
}

type Pools<'a> = BTreeMap<&'a str, Vec<(&'a FeatureMatrix, usize)>>;

fn class_pools<'a>(sets: impl IntoIterator<Item = &'a ImageSet>) -> Pools<'a> {
    let mut sources: Vec<&ImageSet> = sets.into_iter().collect();
    sources.sort_by(|a, b| a.set_id.cmp(&b.set_id));
    let mut pools = Pools::new();
    for set in sources {
        if let Some(label) = set.label.as_deref() {
            pools
                .entry(label)
                .or_default()
                .extend((0..set.len()).map(|j| (&set.features, j)));
        }
    }
    pools
}

fn corrupt(set: &ImageSet, pools: &Pools<'_>, rng: &mut ChaCha8Rng) -> Result<ImageSet> {
    let mut columns: Vec<_> = (0..set.len()).map(|j| set.features.column(j)).collect();
    for (label, pool) in pools {
        if set.label.as_deref() == Some(*label) {
            continue;
        }
        let (m, j) = pool[rng.gen_range(0..pool.len())];
        columns.push(m.column(j));
    }
    Ok(ImageSet {
        features: FeatureMatrix::from_columns(&columns)?,
        ..set.clone()
    })
}

/// Appends one randomly chosen sample of every other class to each
/// targeted set. Gallery sets draw from the clean gallery and probes from
/// the clean probes, so no probe sample ever enters training. A class
/// with no labeled probe samples is drawn from the gallery instead;
/// unlabeled probes receive one sample of every class.
pub fn inject_noise(
    gallery: &Gallery,
    probes: &[ImageSet],
    mode: NoiseMode,
    seed: u64,
) -> Result<(Gallery, Vec<ImageSet>)> {
    if mode == NoiseMode::Nc {
        return Ok((gallery.clone(), probes.to_vec()));
    }
    let gallery_pools = class_pools(gallery.sets());
    let mut probe_pools = gallery_pools.clone();
    probe_pools.extend(class_pools(probes));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corrupted = if mode.corrupts_gallery() {
        Gallery::new(
            gallery
                .sets()
                .iter()
                .map(|s| corrupt(s, &gallery_pools, &mut rng))
                .collect::<Result<_>>()?,
        )?
    } else {
        gallery.clone()
    };
    let probes = if mode.corrupts_probes() {
        probes
            .iter()
            .map(|s| corrupt(s, &probe_pools, &mut rng))
            .collect::<Result<_>>()?
    } else {
        probes.to_vec()
    };
    Ok((corrupted, probes))
}

/// Keeps `min(s, n_r)` samples of each set, chosen uniformly without
/// replacement; kept samples retain their original order.
pub fn subsample_sets(sets: &[ImageSet], n_r: usize, seed: u64) -> Result<Vec<ImageSet>> {
    if n_r == 0 {
        return Err(Error::InvalidParameter("N_r must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sets.iter()
        .map(|set| {
            if set.len() <= n_r {
                return Ok(set.clone());
            }
            let mut keep = index::sample(&mut rng, set.len(), n_r).into_vec();
            keep.sort_unstable();
            Ok(ImageSet {
                features: set.features.select_columns(&keep)?,
                ..set.clone()
            })
        })
        .collect()
}

/// [`subsample_sets`] over a gallery and its probes together.
pub fn subsample(
    gallery: &Gallery,
    probes: &[ImageSet],
    n_r: usize,
    seed: u64,
) -> Result<(Gallery, Vec<ImageSet>)> {
    let all: Vec<ImageSet> = gallery.sets().iter().chain(probes).cloned().collect();
    let mut reduced = subsample_sets(&all, n_r, seed)?;
    let probes = reduced.split_off(gallery.sets().len());
    Ok((Gallery::new(reduced)?, probes))
}
