use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ActivationKind;
use crate::error::{Error, Result};
use crate::matrix::{dims, ensure_finite, FeatureMatrix};

/// The fixed first stage of an ELM: `ψ(x) = g(Wx + b)`.
///
/// `weights` is `n_h × d` with one hidden node per row.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenLayerParams {
    weights: DMatrix<f64>,
    bias: DVector<f64>,
    activation: ActivationKind,
}

impl HiddenLayerParams {
    pub fn new(
        weights: DMatrix<f64>,
        bias: DVector<f64>,
        activation: ActivationKind,
    ) -> Result<Self> {
        if weights.nrows() == 0 || weights.ncols() == 0 {
            return Err(Error::shape(
                "HiddenLayerParams",
                "non-empty W",
                dims(&weights),
            ));
        }
        if bias.len() != weights.nrows() {
            return Err(Error::shape(
                "HiddenLayerParams bias",
                weights.nrows(),
                bias.len(),
            ));
        }
        ensure_finite(&weights, "hidden weights")?;
        if !bias.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("hidden bias"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// A bias-free mapping, used when a learned layer stands in for the
    /// random projection.
    pub fn without_bias(weights: DMatrix<f64>, activation: ActivationKind) -> Result<Self> {
        let n = weights.nrows();
        Self::new(weights, DVector::zeros(n), activation)
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    /// Number of hidden nodes `n_h`.
    pub fn hidden(&self) -> usize {
        self.weights.nrows()
    }

    /// Input dimension `d`.
    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }
}

/// Draws `W` uniformly from `[-1, 1]` and orthonormalizes its rows, then
/// draws biases uniformly from `[-1, 1]`.
///
/// When `hidden > d` only the first `d` rows can be mutually orthonormal;
/// the remaining rows are scaled to unit length.
pub fn random_orthonormal_mapping(d: usize, hidden: usize, seed: u64) -> Result<HiddenLayerParams> {
    if d == 0 || hidden == 0 {
        return Err(Error::InvalidParameter(format!(
            "mapping needs d >= 1 and n_h >= 1 (got d={d}, n_h={hidden})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::from_fn(hidden, d, |_, _| rng.gen_range(-1.0..=1.0));
    let bias = DVector::from_fn(hidden, |_, _| rng.gen_range(-1.0..=1.0));

    let k = hidden.min(d);
    let q = orthonormal_columns(w.rows(0, k).transpose());
    w.rows_mut(0, k).copy_from(&q.transpose());
    for mut row in w.row_iter_mut().skip(k) {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        } else {
            row[0] = 1.0;
        }
    }
    HiddenLayerParams::new(w, bias, ActivationKind::Sigmoid)
}

/// Thin-QR orthonormalization of the columns of `a` (`d × k`, `k ≤ d`),
/// with column signs fixed so that `R` has a non-negative diagonal.
fn orthonormal_columns(a: DMatrix<f64>) -> DMatrix<f64> {
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// `H[i, j] = g(w_iᵀ x_j + b_i)`, returned as an `n_h × s` matrix.
pub fn hidden_response(params: &HiddenLayerParams, x: &FeatureMatrix) -> Result<FeatureMatrix> {
    if x.dim() != params.input_dim() {
        return Err(Error::shape(
            "hidden_response input",
            format!(
                "d = {} (W is {})",
                params.input_dim(),
                dims(&params.weights)
            ),
            format!("d = {}", x.dim()),
        ));
    }
    let mut h = &params.weights * x.as_matrix();
    for mut col in h.column_iter_mut() {
        col += &params.bias;
    }
    params.activation.apply_in_place(&mut h);
    FeatureMatrix::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_error(w: &DMatrix<f64>) -> f64 {
        let n = w.nrows();
        (w * w.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    #[test]
    fn rows_are_orthonormal_when_narrow() {
        let p = random_orthonormal_mapping(5, 3, 7).unwrap();
        assert_eq!(p.weights().shape(), (3, 5));
        assert!(gram_error(p.weights()) < 1e-10);
        assert!(p.bias().iter().all(|b| (-1.0..=1.0).contains(b)));
    }

    #[test]
    fn square_mapping_is_orthogonal() {
        let p = random_orthonormal_mapping(3, 3, 0).unwrap();
        assert!(gram_error(p.weights()) < 1e-10);
        assert!((p.weights().determinant().abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn wide_mapping_keeps_first_d_rows_orthonormal() {
        let p = random_orthonormal_mapping(4, 9, 5).unwrap();
        let w = p.weights();
        assert!(gram_error(&w.rows(0, 4).into_owned()) < 1e-10);
        for row in w.row_iter() {
            assert!((row.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mapping_is_deterministic() {
        let a = random_orthonormal_mapping(6, 4, 42).unwrap();
        let b = random_orthonormal_mapping(6, 4, 42).unwrap();
        assert_eq!(a, b);
        let c = random_orthonormal_mapping(6, 4, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_mapping_gives_one_half() {
        let p = HiddenLayerParams::new(
            DMatrix::zeros(4, 3),
            DVector::zeros(4),
            ActivationKind::Sigmoid,
        )
        .unwrap();
        let x = FeatureMatrix::new(DMatrix::from_fn(3, 5, |i, j| (i * j) as f64)).unwrap();
        let h = hidden_response(&p, &x).unwrap();
        assert_eq!(h.as_matrix().shape(), (4, 5));
        assert!(h.as_matrix().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn unit_weight_zero_input() {
        let mut w = DMatrix::zeros(1, 3);
        w[(0, 0)] = 1.0;
        let p = HiddenLayerParams::without_bias(w, ActivationKind::Sigmoid).unwrap();
        let x = FeatureMatrix::new(DMatrix::zeros(3, 1)).unwrap();
        assert_eq!(hidden_response(&p, &x).unwrap().as_matrix()[(0, 0)], 0.5);
    }

    #[test]
    fn response_matches_elementwise_loop() {
        let p = random_orthonormal_mapping(4, 6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x =
            FeatureMatrix::new(DMatrix::from_fn(4, 10, |_, _| rng.gen_range(-2.0..2.0))).unwrap();
        let h = hidden_response(&p, &x).unwrap();
        for i in 0..6 {
            for j in 0..10 {
                let mut u = p.bias()[i];
                for k in 0..4 {
                    u += p.weights()[(i, k)] * x.as_matrix()[(k, j)];
                }
                let expected = 1.0 / (1.0 + (-u).exp());
                assert!((h.as_matrix()[(i, j)] - expected).abs() < 1e-14);
                assert!(h.as_matrix()[(i, j)] > 0.0 && h.as_matrix()[(i, j)] < 1.0);
            }
        }
    }

    #[test]
    fn response_rejects_dimension_mismatch() {
        let p = random_orthonormal_mapping(4, 2, 1).unwrap();
        let x = FeatureMatrix::new(DMatrix::zeros(5, 2)).unwrap();
        let err = hidden_response(&p, &x).unwrap_err();
        assert!(err.to_string().contains("d = 4"), "{err}");
    }
}
