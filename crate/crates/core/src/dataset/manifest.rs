//! Tab-separated gallery manifests.
//!
//! ```text
//! #delm-manifest v1 d=<d>
//! set_id<TAB>label<TAB>relative_path
//! ```
//!
//! Paths are resolved against the manifest's directory. An empty label
//! marks an unlabeled (probe) set. Further `#` lines and blank lines are
//! ignored.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::format::{read_features, write_atomic, write_features};
use crate::classifier::{Gallery, ImageSet};
use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;
const HEADER_PREFIX: &str = "#delm-manifest";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub set_id: String,
    pub label: Option<String>,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalleryManifest {
    pub feature_dim: usize,
    pub format_version: u32,
    pub entries: Vec<ManifestEntry>,
    /// Directory that entry paths are relative to.
    pub base_dir: PathBuf,
}

impl GalleryManifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let header = lines
            .by_ref()
            .find(|(_, l)| !l.trim().is_empty())
            .map(|(_, l)| l.trim())
            .ok_or_else(|| Error::Manifest("missing `#delm-manifest` header".into()))?;
        let (version, d) = parse_header(header)?;

        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (no, line) in lines {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::Manifest(format!(
                    "line {}: expected 3 tab-separated fields, found {}",
                    no + 1,
                    fields.len()
                )));
            }
            let set_id = fields[0].trim();
            if set_id.is_empty() {
                return Err(Error::Manifest(format!("line {}: empty set_id", no + 1)));
            }
            if !seen.insert(set_id.to_string()) {
                return Err(Error::Manifest(format!(
                    "line {}: duplicate set_id `{set_id}`",
                    no + 1
                )));
            }
            let label = Some(fields[1].trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string);
            entries.push(ManifestEntry {
                set_id: set_id.to_string(),
                label,
                path: PathBuf::from(fields[2].trim()),
            });
        }
        Ok(Self {
            feature_dim: d,
            format_version: version,
            entries,
            base_dir: base_dir.into(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, base)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "{HEADER_PREFIX} v{} d={}\n",
            self.format_version, self.feature_dim
        );
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                e.set_id,
                e.label.as_deref().unwrap_or(""),
                e.path.display()
            );
        }
        out
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }
}

fn parse_header(line: &str) -> Result<(u32, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(HEADER_PREFIX) {
        return Err(Error::Manifest(format!(
            "bad header `{line}`, expected `{HEADER_PREFIX} v1 d=<d>`"
        )));
    }
    let version = parts
        .next()
        .and_then(|v| v.strip_prefix('v'))
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| Error::Manifest(format!("bad header `{line}`: missing version")))?;
    if version != MANIFEST_VERSION {
        return Err(Error::Manifest(format!(
            "unsupported manifest version v{version}"
        )));
    }
    let d = parts
        .next()
        .and_then(|v| v.strip_prefix("d="))
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Manifest(format!("bad header `{line}`: missing d=<d>")))?;
    Ok((version, d))
}

/// Loads every referenced set, labeled or not.
pub fn load_sets(manifest: &GalleryManifest) -> Result<Vec<ImageSet>> {
    if manifest.entries.is_empty() {
        return Err(Error::EmptyGallery);
    }
    manifest
        .entries
        .par_iter()
        .map(|entry| {
            let path = manifest.resolve(entry);
            let features = read_features(&path)?;
            if features.dim() != manifest.feature_dim {
                return Err(Error::Manifest(format!(
                    "set `{}`: file {} has d={} but the manifest declares d={}",
                    entry.set_id,
                    path.display(),
                    features.dim(),
                    manifest.feature_dim
                )));
            }
            Ok(ImageSet::new(
                entry.set_id.clone(),
                entry.label.clone(),
                features,
            ))
        })
        .collect()
}

/// Loads a labeled gallery.
pub fn load_gallery(manifest: &GalleryManifest) -> Result<Gallery> {
    if let Some(e) = manifest.entries.iter().find(|e| e.label.is_none()) {
        return Err(Error::Manifest(format!(
            "gallery set `{}` has no label",
            e.set_id
        )));
    }
    Gallery::new(load_sets(manifest)?)
}

fn file_stem(set_id: &str) -> String {
    set_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes one feature file per set plus `manifest_name` into `dir`.
pub fn save_sets(sets: &[ImageSet], dir: &Path, manifest_name: &str) -> Result<PathBuf> {
    let Some(first) = sets.first() else {
        return Err(Error::EmptyGallery);
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(sets.len());
    let mut used = HashSet::new();
    for (k, set) in sets.iter().enumerate() {
        let mut name = format!("{}.dlmf", file_stem(&set.set_id));
        if !used.insert(name.clone()) {
            name = format!("{}_{k}.dlmf", file_stem(&set.set_id));
            used.insert(name.clone());
        }
        write_features(&dir.join(&name), &set.features)?;
        entries.push(ManifestEntry {
            set_id: set.set_id.clone(),
            label: set.label.clone(),
            path: PathBuf::from(name),
        });
    }
    let manifest = GalleryManifest {
        feature_dim: first.dim(),
        format_version: MANIFEST_VERSION,
        entries,
        base_dir: dir.to_path_buf(),
    };
    let path = dir.join(manifest_name);
    write_atomic(&path, manifest.render().as_bytes())?;
    Ok(path)
}

pub fn save_gallery(gallery: &Gallery, dir: &Path, manifest_name: &str) -> Result<PathBuf> {
    save_sets(gallery.sets(), dir, manifest_name)
}
