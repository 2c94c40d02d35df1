//! Little-endian binary containers for feature matrices and models.
//!
//! Every container starts with a 4-byte magic and a `u32` format version
//! and ends with a CRC-32 of all preceding bytes.
//!
//! Feature file (`DLMF`): `d: u64, s: u64`, then `d·s` column-major `f64`.
//!
//! Model (`DLMM`): activation tag `u8`, `n_dims: u32`, dims as `u64`,
//! feature stats (`u8` presence flag; scope `u8`, `ε: f64`, `d` minima,
//! `d` maxima), `n_weights: u32`, then per weight `rows: u64, cols: u64`
//! and row-major `f64` data.
//!
//! Class models (`DLMC`): train config, label table, the global model and
//! each class model as embedded, length-prefixed `DLMM` blobs.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::autoencoder::{DelmModel, Refit};
use crate::classifier::{ClassModels, TrainConfig};
use crate::dataset::normalize::{NormalizationScope, NormalizationStats};
use crate::elm::ActivationKind;
use crate::error::{Error, FormatError, Result};
use crate::matrix::FeatureMatrix;

pub const FEATURE_MAGIC: [u8; 4] = *b"DLMF";
pub const MODEL_MAGIC: [u8; 4] = *b"DLMM";
pub const CLASS_MODELS_MAGIC: [u8; 4] = *b"DLMC";
pub const FORMAT_VERSION: u32 = 1;

const HEADER_LEN: usize = 8;
const CHECKSUM_LEN: usize = 4;

struct Writer(Vec<u8>);

impl Writer {
    fn new(magic: [u8; 4]) -> Self {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(&magic);
        w.u32(FORMAT_VERSION);
        w
    }

    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.usize(b.len());
        self.0.extend_from_slice(b);
    }

    fn finish(mut self) -> Vec<u8> {
        let crc = crc32fast::hash(&self.0);
        self.u32(crc);
        self.0
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks magic, version and checksum, and positions after the header.
    fn open(data: &'a [u8], magic: [u8; 4]) -> std::result::Result<Self, FormatError> {
        if data.len() < 4 {
            return Err(FormatError::Truncated {
                offset: 0,
                needed: 4 - data.len(),
            });
        }
        let found: [u8; 4] = data[..4].try_into().unwrap();
        if found != magic {
            return Err(FormatError::BadMagic {
                expected: magic,
                found,
            });
        }
        if data.len() < HEADER_LEN + CHECKSUM_LEN {
            return Err(FormatError::Truncated {
                offset: data.len(),
                needed: HEADER_LEN + CHECKSUM_LEN - data.len(),
            });
        }
        let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(FormatError::UnsupportedVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let (body, tail) = data.split_at(data.len() - CHECKSUM_LEN);
        let stored = u32::from_le_bytes(tail.try_into().unwrap());
        let computed = crc32fast::hash(body);
        if stored != computed {
            return Err(FormatError::Checksum { stored, computed });
        }
        Ok(Reader {
            buf: body,
            pos: HEADER_LEN,
        })
    }

    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], FormatError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(FormatError::Truncated {
                offset: self.pos,
                needed: n.saturating_sub(self.buf.len() - self.pos),
            })?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> std::result::Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> std::result::Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> std::result::Result<usize, FormatError> {
        let v = self.u64()?;
        usize::try_from(v)
            .map_err(|_| FormatError::Invalid(format!("size {v} does not fit in memory")))
    }

    fn f64(&mut self) -> std::result::Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Reads `n` floats after checking that they are present.
    fn f64s(&mut self, n: usize) -> std::result::Result<Vec<f64>, FormatError> {
        let bytes = self.take(
            n.checked_mul(8)
                .ok_or_else(|| FormatError::Invalid("length overflow".into()))?,
        )?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn bytes(&mut self) -> std::result::Result<&'a [u8], FormatError> {
        let n = self.usize()?;
        self.take(n)
    }

    fn finish(self) -> std::result::Result<(), FormatError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(FormatError::Invalid(format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )))
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Format(FormatError::Invalid(msg.into()))
}

pub fn encode_features(x: &FeatureMatrix) -> Vec<u8> {
    let mut w = Writer::new(FEATURE_MAGIC);
    w.usize(x.dim());
    w.usize(x.samples());
    for v in x.as_matrix().iter() {
        w.f64(*v);
    }
    w.finish()
}

pub fn decode_features(data: &[u8]) -> Result<FeatureMatrix> {
    let mut r = Reader::open(data, FEATURE_MAGIC)?;
    let d = r.usize()?;
    let s = r.usize()?;
    let n = d
        .checked_mul(s)
        .ok_or_else(|| invalid("feature size overflow"))?;
    let values = r.f64s(n)?;
    r.finish()?;
    FeatureMatrix::new(DMatrix::from_vec(d, s, values))
}

fn write_model_body(w: &mut Writer, model: &DelmModel) {
    w.u8(model.activation().tag());
    w.u32(model.dims().len() as u32);
    for &d in model.dims() {
        w.usize(d);
    }
    match model.feature_stats() {
        None => w.u8(0),
        Some(stats) => {
            w.u8(1);
            w.u8(stats.scope().tag());
            w.f64(stats.epsilon());
            stats.min().iter().for_each(|v| w.f64(*v));
            stats.max().iter().for_each(|v| w.f64(*v));
        }
    }
    w.u32(model.weights().len() as u32);
    for m in model.weights() {
        w.usize(m.nrows());
        w.usize(m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                w.f64(m[(i, j)]);
            }
        }
    }
}

pub fn encode_model(model: &DelmModel) -> Vec<u8> {
    let mut w = Writer::new(MODEL_MAGIC);
    write_model_body(&mut w, model);
    w.finish()
}

pub fn decode_model(data: &[u8]) -> Result<DelmModel> {
    let mut r = Reader::open(data, MODEL_MAGIC)?;
    let activation =
        ActivationKind::from_tag(r.u8()?).ok_or_else(|| invalid("unknown activation tag"))?;
    let n_dims = r.u32()? as usize;
    if n_dims < 2 {
        return Err(invalid(format!(
            "model needs at least 2 dims, found {n_dims}"
        )));
    }
    let dims = (0..n_dims)
        .map(|_| r.usize())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let stats = match r.u8()? {
        0 => None,
        1 => {
            let scope = NormalizationScope::from_tag(r.u8()?)
                .ok_or_else(|| invalid("unknown normalization scope"))?;
            let eps = r.f64()?;
            let min = r.f64s(dims[0])?;
            let max = r.f64s(dims[0])?;
            Some(NormalizationStats::new(scope, min, max, eps)?)
        }
        other => return Err(invalid(format!("bad feature-stats flag {other}"))),
    };
    let n_weights = r.u32()? as usize;
    if n_weights + 1 != n_dims {
        return Err(invalid(format!(
            "{n_weights} weight matrices for {n_dims} dims"
        )));
    }
    let mut weights = Vec::with_capacity(n_weights);
    for k in 0..n_weights {
        let rows = r.usize()?;
        let cols = r.usize()?;
        if rows != dims[k + 1] || cols != dims[k] {
            return Err(invalid(format!(
                "weight {k} is {rows}x{cols}, dims require {}x{}",
                dims[k + 1],
                dims[k]
            )));
        }
        let values = r.f64s(rows * cols)?;
        weights.push(DMatrix::from_row_slice(rows, cols, &values));
    }
    r.finish()?;
    DelmModel::from_weights(weights, activation, stats)
}

pub fn encode_class_models(models: &ClassModels) -> Vec<u8> {
    let mut w = Writer::new(CLASS_MODELS_MAGIC);
    let config = models.config();
    w.u32(config.widths.len() as u32);
    config.widths.iter().for_each(|&n| w.usize(n));
    w.u32(config.c_per_layer.len() as u32);
    config.c_per_layer.iter().for_each(|&c| w.f64(c));
    w.u64(config.seed);
    w.u8(config.activation.tag());
    w.u8(config.normalization.tag());
    w.f64(config.epsilon);
    w.u8(config.refit.tag());

    w.u32(models.labels().len() as u32);
    for label in models.labels() {
        w.bytes(label.as_bytes());
    }
    w.bytes(&encode_model(models.global()));
    for (k, (_, model)) in models.class_models().enumerate() {
        w.u32(k as u32);
        w.bytes(&encode_model(model));
    }
    w.finish()
}

pub fn decode_class_models(data: &[u8]) -> Result<ClassModels> {
    let mut r = Reader::open(data, CLASS_MODELS_MAGIC)?;
    let h = r.u32()? as usize;
    let widths = (0..h)
        .map(|_| r.usize())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let n_c = r.u32()? as usize;
    let c_per_layer = r.f64s(n_c)?;
    let seed = r.u64()?;
    let activation =
        ActivationKind::from_tag(r.u8()?).ok_or_else(|| invalid("unknown activation tag"))?;
    let normalization = NormalizationScope::from_tag(r.u8()?)
        .ok_or_else(|| invalid("unknown normalization scope"))?;
    let epsilon = r.f64()?;
    let refit = Refit::from_tag(r.u8()?).ok_or_else(|| invalid("unknown refit mode"))?;
    let config = TrainConfig {
        widths,
        c_per_layer,
        seed,
        activation,
        normalization,
        epsilon,
        refit,
    };

    let n_labels = r.u32()? as usize;
    let labels = (0..n_labels)
        .map(|_| {
            let b = r.bytes()?;
            String::from_utf8(b.to_vec())
                .map_err(|_| FormatError::Invalid("label is not UTF-8".into()))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let global = decode_model(r.bytes()?)?;
    let mut per_class = Vec::with_capacity(n_labels);
    for (k, label) in labels.iter().enumerate() {
        let index = r.u32()? as usize;
        if index != k {
            return Err(invalid(format!(
                "class model {k} carries label index {index}"
            )));
        }
        per_class.push((label.clone(), decode_model(r.bytes()?)?));
    }
    r.finish()?;
    ClassModels::new(global, per_class, config)
}

/// Writes through a temporary file in the destination directory and
/// renames it into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(f) => Error::Manifest(format!("{}: {f}", path.display())),
        other => other,
    })
}

pub fn write_features(path: &Path, x: &FeatureMatrix) -> Result<()> {
    write_atomic(path, &encode_features(x))
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    with_path(path, decode_features(&read_file(path)?))
}

pub fn save_model(path: &Path, model: &DelmModel) -> Result<()> {
    write_atomic(path, &encode_model(model))
}

pub fn load_model(path: &Path) -> Result<DelmModel> {
    decode_model(&read_file(path)?)
}

pub fn save_class_models(path: &Path, models: &ClassModels) -> Result<()> {
    write_atomic(path, &encode_class_models(models))
}

pub fn load_class_models(path: &Path) -> Result<ClassModels> {
    decode_class_models(&read_file(path)?)
}
