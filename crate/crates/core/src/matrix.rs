//! The feature-matrix newtype shared by every module.
//!
//! Features are stored column-major with one sample per column (`d × s`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A `d × s` matrix of finite feature vectors, one sample per column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(DMatrix<f64>);

impl FeatureMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::shape(
                "FeatureMatrix::new",
                "d >= 1 and s >= 1",
                format!("{}x{}", data.nrows(), data.ncols()),
            ));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        Ok(Self(data))
    }

    /// Builds a matrix from a list of equally sized sample vectors.
    pub fn from_columns(columns: &[DVector<f64>]) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::shape("FeatureMatrix::from_columns", "s >= 1", 0));
        };
        if let Some(bad) = columns.iter().find(|c| c.len() != first.len()) {
            return Err(Error::shape(
                "FeatureMatrix::from_columns",
                first.len(),
                bad.len(),
            ));
        }
        Self::new(DMatrix::from_columns(columns))
    }

    /// Horizontal concatenation; all parts must share `d`.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a FeatureMatrix>) -> Result<Self> {
        let parts: Vec<&FeatureMatrix> = parts.into_iter().collect();
        let Some(first) = parts.first() else {
            return Err(Error::EmptyGallery);
        };
        let d = first.dim();
        let s: usize = parts.iter().map(|p| p.samples()).sum();
        let mut out = DMatrix::zeros(d, s);
        let mut offset = 0;
        for p in parts {
            if p.dim() != d {
                return Err(Error::shape("FeatureMatrix::concat", d, p.dim()));
            }
            out.columns_mut(offset, p.samples())
                .copy_from(p.as_matrix());
            offset += p.samples();
        }
        Ok(Self(out))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn samples(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.0.column(j).into_owned()
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::shape("FeatureMatrix::select_columns", "s >= 1", 0));
        }
        Ok(Self(self.0.select_columns(indices)))
    }
}

impl AsRef<DMatrix<f64>> for FeatureMatrix {
    fn as_ref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl TryFrom<DMatrix<f64>> for FeatureMatrix {
    type Error = Error;

    fn try_from(m: DMatrix<f64>) -> Result<Self> {
        Self::new(m)
    }
}

pub(crate) fn ensure_finite(m: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn dims(m: &DMatrix<f64>) -> String {
    format!("{}x{}", m.nrows(), m.ncols())
}
