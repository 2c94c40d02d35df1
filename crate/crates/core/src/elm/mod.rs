//! Single-hidden-layer extreme learning machine primitives.
//!
//! An ELM is trained in two stages: a fixed random feature mapping
//! `ψ(x) = g(Wx + b)` followed by a closed-form solve for the output
//! weights `B` so that `ψ(x_j) B ≈ t_jᵀ`. This module exposes both stages
//! separately so the auto-encoder can reuse them layer by layer.

mod activation;
mod mapping;
mod solver;

pub use activation::ActivationKind;
pub use mapping::{hidden_response, random_orthonormal_mapping, HiddenLayerParams};
pub use solver::{
    solve_orthogonal_procrustes, solve_ridge, solve_ridge_overdetermined,
    solve_ridge_underdetermined, OutputWeights, SolveDiagnostics, SolveMethod,
};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{dims, FeatureMatrix};

/// A trained single-hidden-layer network.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedElm {
    pub params: HiddenLayerParams,
    pub output: OutputWeights,
}

impl TrainedElm {
    pub fn predict(&self, x: &FeatureMatrix) -> Result<DMatrix<f64>> {
        elm_predict(&self.params, &self.output, x)
    }
}

/// Trains an ELM mapping the columns of `x` onto the columns of `targets`
/// (`q × s`, one target per sample).
pub fn train_elm(
    x: &FeatureMatrix,
    targets: &DMatrix<f64>,
    hidden: usize,
    c: f64,
    seed: u64,
) -> Result<TrainedElm> {
    if targets.ncols() != x.samples() {
        return Err(Error::shape(
            "train_elm targets",
            format!("q x {}", x.samples()),
            dims(targets),
        ));
    }
    let params = random_orthonormal_mapping(x.dim(), hidden, seed)?;
    let h = hidden_response(&params, x)?;
    let output = solve_ridge(&h.as_matrix().transpose(), &targets.transpose(), c)?;
    Ok(TrainedElm { params, output })
}

/// Feeds `x` forward: row `j` of the result is `ψ(x_j) · B`.
pub fn elm_predict(
    params: &HiddenLayerParams,
    output: &OutputWeights,
    x: &FeatureMatrix,
) -> Result<DMatrix<f64>> {
    if output.matrix.nrows() != params.hidden() {
        return Err(Error::shape(
            "elm_predict output weights",
            format!("{} x q", params.hidden()),
            dims(&output.matrix),
        ));
    }
    let h = hidden_response(params, x)?;
    Ok(h.as_matrix().tr_mul(&output.matrix))
}
