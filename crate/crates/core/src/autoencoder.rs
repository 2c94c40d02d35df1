//! Layer-wise training of deep ELM auto-encoders and reconstruction
//! through them.
//!
//! A model with `h` hidden layers holds `h + 1` weight matrices. Layer `i`
//! is trained as an ELM auto-encoder on the previous representation: a
//! fixed mapping projects the input, output weights `B` re-project it back
//! onto the input, and `B` becomes the layer's encoder. When a layer keeps
//! the width of its input, `B` is the orthogonal Procrustes solution
//! instead of the ridge solution. The last matrix decodes the final
//! representation back to input space, fitted against `logit(X)` so that
//! the outer sigmoid reproduces `X`.

use nalgebra::{DMatrix, DVector};

use crate::dataset::normalize::{NormalizationStats, DEFAULT_EPSILON};
use crate::elm::{
    hidden_response, random_orthonormal_mapping, solve_orthogonal_procrustes, solve_ridge,
    ActivationKind, HiddenLayerParams, SolveDiagnostics, SolveMethod,
};
use crate::error::{Error, Result};
use crate::matrix::{dims, ensure_finite, FeatureMatrix};

/// Width, regularization and mapping seed of one hidden layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub width: usize,
    /// Ridge tradeoff; unused when the layer takes the Procrustes branch.
    pub c: f64,
    pub seed: u64,
}

impl LayerSpec {
    pub fn new(width: usize, c: f64, seed: u64) -> Result<Self> {
        let spec = Self { width, c, seed };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::InvalidParameter("layer width must be >= 1".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "layer C must be > 0, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

/// How a model initialized from another model is re-trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Refit {
    /// Every hidden layer uses the init weights as its fixed mapping and
    /// re-solves its own output weights; the decoder is re-solved too.
    #[default]
    AllLayers,
    /// Hidden layers are copied from the init model; only the decoder is
    /// re-solved.
    DecoderOnly,
}

impl Refit {
    pub fn tag(self) -> u8 {
        match self {
            Refit::AllLayers => 0,
            Refit::DecoderOnly => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Refit::AllLayers),
            1 => Some(Refit::DecoderOnly),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Refit::AllLayers => "all-layers",
            Refit::DecoderOnly => "decoder-only",
        }
    }
}

impl std::str::FromStr for Refit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-layers" | "all" => Ok(Refit::AllLayers),
            "decoder-only" | "decoder" => Ok(Refit::DecoderOnly),
            other => Err(Error::InvalidParameter(format!(
                "unknown refit mode `{other}`"
            ))),
        }
    }
}

/// One solve performed during training, reported to a [`TrainObserver`].
#[derive(Debug)]
pub struct SolveEvent<'a> {
    /// Zero-based index of the weight matrix being solved.
    pub layer: usize,
    pub method: SolveMethod,
    /// Representation entering the layer (`n_in × s`).
    pub input: &'a DMatrix<f64>,
    /// Pre-solve hidden response. For the decoding layer this is the input.
    pub hidden: &'a DMatrix<f64>,
    /// Estimated bytes held by the matrices live during this solve.
    pub working_bytes: usize,
}

/// Instrumentation hook invoked once per closed-form solve.
pub trait TrainObserver: Sync {
    fn on_solve(&self, model: &str, event: &SolveEvent<'_>);
}

impl TrainObserver for () {
    fn on_solve(&self, _: &str, _: &SolveEvent<'_>) {}
}

/// Result of training one auto-encoder layer.
#[derive(Debug, Clone)]
pub struct TrainedLayer {
    /// Learned encoder, `n_h × n_in`.
    pub weights: DMatrix<f64>,
    /// `g(weights · X_in)`, the representation fed to the next layer.
    pub output: FeatureMatrix,
    pub diagnostics: SolveDiagnostics,
}

const F64: usize = std::mem::size_of::<f64>();

pub fn train_ae_layer(
    x_in: &FeatureMatrix,
    spec: &LayerSpec,
    init: Option<&HiddenLayerParams>,
) -> Result<TrainedLayer> {
    train_layer_observed(x_in, spec, init, 0, &(), "")
}

fn train_layer_observed(
    x_in: &FeatureMatrix,
    spec: &LayerSpec,
    init: Option<&HiddenLayerParams>,
    layer: usize,
    observer: &dyn TrainObserver,
    tag: &str,
) -> Result<TrainedLayer> {
    spec.validate()?;
    let d = x_in.dim();
    let s = x_in.samples();
    let generated;
    let mapping = match init {
        Some(m) => {
            if m.hidden() != spec.width || m.input_dim() != d {
                return Err(Error::shape(
                    "train_ae_layer init",
                    format!("{}x{}", spec.width, d),
                    dims(m.weights()),
                ));
            }
            m
        }
        None => {
            generated = random_orthonormal_mapping(d, spec.width, spec.seed)?;
            &generated
        }
    };
    let h = hidden_response(mapping, x_in)?;
    let samples = h.as_matrix().transpose();
    let targets = x_in.as_matrix().transpose();
    let output = if spec.width == d {
        solve_orthogonal_procrustes(&samples, &targets)?
    } else {
        solve_ridge(&samples, &targets, spec.c)?
    };

    let n = spec.width;
    let gram = n.min(s).pow(2);
    let working_bytes = F64 * (2 * d * s + n * d + 2 * n * s + gram + 2 * n * d + n * s);
    observer.on_solve(
        tag,
        &SolveEvent {
            layer,
            method: output.diagnostics.method,
            input: x_in.as_matrix(),
            hidden: h.as_matrix(),
            working_bytes,
        },
    );

    let weights = output.matrix;
    let mut next = &weights * x_in.as_matrix();
    mapping.activation().apply_in_place(&mut next);
    Ok(TrainedLayer {
        output: FeatureMatrix::new(next)?,
        weights,
        diagnostics: output.diagnostics,
    })
}

/// A trained deep ELM auto-encoder `L = {W¹, …, W^{h+1}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelmModel {
    weights: Vec<DMatrix<f64>>,
    dims: Vec<usize>,
    activation: ActivationKind,
    feature_stats: Option<NormalizationStats>,
}

impl DelmModel {
    /// Assembles a model from explicit weights, checking that consecutive
    /// matrices chain and that the network closes on its input space.
    pub fn from_weights(
        weights: Vec<DMatrix<f64>>,
        activation: ActivationKind,
        feature_stats: Option<NormalizationStats>,
    ) -> Result<Self> {
        let Some(first) = weights.first() else {
            return Err(Error::InvalidParameter(
                "a model needs at least one weight matrix".into(),
            ));
        };
        let mut chain = vec![first.ncols()];
        for w in &weights {
            let prev = *chain.last().unwrap();
            if w.ncols() != prev || w.nrows() == 0 {
                return Err(Error::shape(
                    "DelmModel layer chain",
                    format!("? x {prev}"),
                    dims(w),
                ));
            }
            ensure_finite(w, "model weights")?;
            chain.push(w.nrows());
        }
        if chain[0] != *chain.last().unwrap() {
            return Err(Error::shape(
                "DelmModel closure",
                chain[0],
                chain.last().unwrap(),
            ));
        }
        if let Some(stats) = &feature_stats {
            if stats.dim() != chain[0] {
                return Err(Error::shape(
                    "DelmModel feature stats",
                    chain[0],
                    stats.dim(),
                ));
            }
        }
        Ok(Self {
            weights,
            dims: chain,
            activation,
            feature_stats,
        })
    }

    pub fn weights(&self) -> &[DMatrix<f64>] {
        &self.weights
    }

    /// `[d, n_1, …, n_h, d]`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    /// Number of hidden layers `h`.
    pub fn depth(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn feature_stats(&self) -> Option<&NormalizationStats> {
        self.feature_stats.as_ref()
    }

    pub fn with_feature_stats(mut self, stats: Option<NormalizationStats>) -> Result<Self> {
        if let Some(s) = &stats {
            if s.dim() != self.input_dim() {
                return Err(Error::shape(
                    "DelmModel feature stats",
                    self.input_dim(),
                    s.dim(),
                ));
            }
        }
        self.feature_stats = stats;
        Ok(self)
    }

    /// Bytes held by the weight matrices.
    pub fn weight_bytes(&self) -> usize {
        self.weights.iter().map(|w| w.len() * F64).sum()
    }

    /// `x̂ = g(W^{h+1} g(W^h ⋯ g(W¹ x)))` for every column of `x`.
    pub fn reconstruct_batch(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        if x.dim() != self.input_dim() {
            return Err(Error::shape(
                "reconstruct",
                format!("d = {}", self.input_dim()),
                format!("d = {}", x.dim()),
            ));
        }
        let mut rep = x.as_matrix().clone();
        for w in &self.weights {
            rep = w * rep;
            self.activation.apply_in_place(&mut rep);
        }
        FeatureMatrix::new(rep)
    }

    pub fn reconstruct(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::shape(
                "reconstruct",
                format!("d = {}", self.input_dim()),
                format!("d = {}", x.len()),
            ));
        }
        let mut rep = x.clone();
        for w in &self.weights {
            rep = w * rep;
            rep.apply(|u| *u = self.activation.apply(*u));
        }
        Ok(rep)
    }

    /// Squared Euclidean reconstruction error of a single sample.
    pub fn reconstruction_error(&self, x: &DVector<f64>) -> Result<f64> {
        Ok((x - self.reconstruct(x)?).norm_squared())
    }

    /// Squared reconstruction error of every column.
    pub fn reconstruction_errors(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        let rec = self.reconstruct_batch(x)?;
        Ok((x.as_matrix() - rec.as_matrix())
            .column_iter()
            .map(|c| c.norm_squared())
            .collect())
    }
}

pub fn reconstruct(model: &DelmModel, x: &DVector<f64>) -> Result<DVector<f64>> {
    model.reconstruct(x)
}

pub fn reconstruction_error(model: &DelmModel, x: &DVector<f64>) -> Result<f64> {
    model.reconstruction_error(x)
}

/// Trains a deep ELM auto-encoder on normalized features.
///
/// With `init`, each hidden layer uses the corresponding init weights
/// (without bias) as its fixed mapping instead of a random one, and its
/// output weights are re-solved on `x`.
pub fn train_delm(
    x: &FeatureMatrix,
    specs: &[LayerSpec],
    final_c: f64,
    init: Option<&DelmModel>,
) -> Result<DelmModel> {
    train_delm_observed(x, specs, final_c, init, Refit::AllLayers, &(), "")
}

#[allow(clippy::too_many_arguments)]
pub fn train_delm_observed(
    x: &FeatureMatrix,
    specs: &[LayerSpec],
    final_c: f64,
    init: Option<&DelmModel>,
    refit: Refit,
    observer: &dyn TrainObserver,
    tag: &str,
) -> Result<DelmModel> {
    check_normalized(x)?;
    let d = x.dim();
    let expected_dims: Vec<usize> = std::iter::once(d)
        .chain(specs.iter().map(|s| s.width))
        .chain(std::iter::once(d))
        .collect();
    if let Some(init) = init {
        if init.dims() != expected_dims.as_slice() {
            return Err(Error::shape(
                "train_delm init dims",
                format!("{expected_dims:?}"),
                format!("{:?}", init.dims()),
            ));
        }
    }
    let activation = init.map_or(ActivationKind::Sigmoid, |m| m.activation());

    let mut weights = Vec::with_capacity(specs.len() + 1);
    let mut rep = x.clone();
    for (i, spec) in specs.iter().enumerate() {
        if let (Some(m), Refit::DecoderOnly) = (init, refit) {
            let w = m.weights()[i].clone();
            let mut next = &w * rep.as_matrix();
            activation.apply_in_place(&mut next);
            weights.push(w);
            rep = FeatureMatrix::new(next)?;
            continue;
        }
        let mapping = init
            .map(|m| HiddenLayerParams::without_bias(m.weights()[i].clone(), activation))
            .transpose()?;
        let layer = train_layer_observed(&rep, spec, mapping.as_ref(), i, observer, tag)?;
        weights.push(layer.weights);
        rep = layer.output;
    }

    let decoder = solve_decoder(&rep, x, final_c, activation, specs.len(), observer, tag)?;
    weights.push(decoder);
    DelmModel::from_weights(weights, activation, None)
}

/// Fits `W` (`d × n_h`) so that `g(W · rep) ≈ x`, by ridge regression on
/// `logit(clamp(x))`.
fn solve_decoder(
    rep: &FeatureMatrix,
    x: &FeatureMatrix,
    c: f64,
    activation: ActivationKind,
    layer: usize,
    observer: &dyn TrainObserver,
    tag: &str,
) -> Result<DMatrix<f64>> {
    let eps = DEFAULT_EPSILON;
    let targets = x
        .as_matrix()
        .transpose()
        .map(|v| activation.inverse(v.clamp(eps, 1.0 - eps)));
    let samples = rep.as_matrix().transpose();
    let out = solve_ridge(&samples, &targets, c)?;

    let (n, s, d) = (rep.dim(), rep.samples(), x.dim());
    let working_bytes = F64 * (n * s + 2 * d * s + n.min(s).pow(2) + n * d + s * n);
    observer.on_solve(
        tag,
        &SolveEvent {
            layer,
            method: out.diagnostics.method,
            input: rep.as_matrix(),
            hidden: rep.as_matrix(),
            working_bytes,
        },
    );
    Ok(out.matrix.transpose())
}

fn check_normalized(x: &FeatureMatrix) -> Result<()> {
    let m = x.as_matrix();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Unnormalized {
                    value: v,
                    row: i,
                    col: j,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Mutex;

    fn uniform(d: usize, s: usize, lo: f64, hi: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FeatureMatrix::new(DMatrix::from_fn(d, s, |_, _| rng.gen_range(lo..hi))).unwrap()
    }

    fn specs(widths: &[usize], c: f64) -> Vec<LayerSpec> {
        widths
            .iter()
            .enumerate()
            .map(|(i, &w)| LayerSpec::new(w, c, 100 + i as u64).unwrap())
            .collect()
    }

    fn mean_error(model: &DelmModel, x: &FeatureMatrix) -> f64 {
        let e = model.reconstruction_errors(x).unwrap();
        e.iter().sum::<f64>() / e.len() as f64
    }

    #[derive(Default)]
    struct Recorder(Mutex<Vec<(usize, SolveMethod, DMatrix<f64>, DMatrix<f64>)>>);

    impl TrainObserver for Recorder {
        fn on_solve(&self, _: &str, e: &SolveEvent<'_>) {
            self.0
                .lock()
                .unwrap()
                .push((e.layer, e.method, e.input.clone(), e.hidden.clone()));
        }
    }

    #[test]
    fn equal_width_layer_is_orthogonal() {
        let x = uniform(4, 30, 0.0, 1.0, 1);
        let layer = train_ae_layer(&x, &LayerSpec::new(4, 1e6, 3).unwrap(), None).unwrap();
        assert_eq!(layer.diagnostics.method, SolveMethod::Procrustes);
        let w = &layer.weights;
        assert!((w.tr_mul(w) - DMatrix::<f64>::identity(4, 4)).amax() < 1e-10);
    }

    #[test]
    fn narrowing_layer_uses_ridge() {
        let x = uniform(10, 50, 0.0, 1.0, 2);
        let layer = train_ae_layer(&x, &LayerSpec::new(3, 1e6, 3).unwrap(), None).unwrap();
        assert_ne!(layer.diagnostics.method, SolveMethod::Procrustes);
        assert_eq!(layer.weights.shape(), (3, 10));
        assert_eq!(layer.output.as_matrix().shape(), (3, 50));
    }

    #[test]
    fn layer_rejects_mismatched_init() {
        let x = uniform(5, 10, 0.0, 1.0, 2);
        let init = random_orthonormal_mapping(4, 3, 1).unwrap();
        assert!(train_ae_layer(&x, &LayerSpec::new(3, 1.0, 0).unwrap(), Some(&init)).is_err());
    }

    #[test]
    fn low_dimensional_data_reconstructs_better() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let basis = random_orthonormal_mapping(5, 2, 77)
            .unwrap()
            .weights()
            .transpose();
        let coeffs = DMatrix::from_fn(2, 80, |_, _| rng.gen_range(-0.3..0.3));
        let sub = (&basis * coeffs).add_scalar(0.5);
        let sub = FeatureMatrix::new(sub).unwrap();
        let full = uniform(5, 80, 0.5 - 0.3, 0.5 + 0.3, 9);
        let spec = specs(&[2], 1e6);
        let e_sub = mean_error(&train_delm(&sub, &spec, 1e6, None).unwrap(), &sub);
        let e_full = mean_error(&train_delm(&full, &spec, 1e6, None).unwrap(), &full);
        assert!(e_sub < e_full, "{e_sub} vs {e_full}");
    }

    #[test]
    fn paper_sized_architecture() {
        let x = uniform(400, 60, 0.0, 1.0, 4);
        let model = train_delm(&x, &specs(&[20, 20], 1e6), 1e18, None).unwrap();
        assert_eq!(model.weights().len(), 3);
        assert_eq!(model.dims(), &[400, 20, 20, 400]);
        assert_eq!(model.depth(), 2);
    }

    #[test]
    fn training_is_deterministic() {
        let x = uniform(12, 40, 0.0, 1.0, 5);
        let a = train_delm(&x, &specs(&[6, 6], 1e6), 1e18, None).unwrap();
        let b = train_delm(&x, &specs(&[6, 6], 1e6), 1e18, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn beats_mean_image_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let centers: Vec<DVector<f64>> = (0..3)
            .map(|_| DVector::from_fn(10, |_, _| rng.gen_range(0.2..0.8)))
            .collect();
        let cols: Vec<DVector<f64>> = (0..90)
            .map(|j| centers[j % 3].map(|c| (c + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0)))
            .collect();
        let x = FeatureMatrix::from_columns(&cols).unwrap();
        let model = train_delm(&x, &specs(&[8, 8], 1e6), 1e18, None).unwrap();
        let mean = x.as_matrix().column_mean();
        let baseline = x
            .as_matrix()
            .column_iter()
            .map(|c| (c - &mean).norm_squared())
            .sum::<f64>()
            / x.samples() as f64;
        assert!(mean_error(&model, &x) <= baseline);
    }

    #[test]
    fn zero_weights_reconstruct_one_half() {
        let model = DelmModel::from_weights(
            vec![DMatrix::zeros(3, 6), DMatrix::zeros(6, 3)],
            ActivationKind::Sigmoid,
            None,
        )
        .unwrap();
        let x = DVector::from_vec(vec![0.1, 0.3, 0.2, 0.9, 0.0, 1.0]);
        assert!(model.reconstruct(&x).unwrap().iter().all(|&v| v == 0.5));
        let half = DVector::from_element(6, 0.5);
        assert_eq!(model.reconstruction_error(&half).unwrap(), 0.0);
    }

    #[test]
    fn shallow_model_fits_single_vector() {
        let x = FeatureMatrix::new(DMatrix::from_column_slice(
            5,
            1,
            &[0.1, 0.4, 0.35, 0.8, 0.95],
        ))
        .unwrap();
        let model = train_delm(&x, &[], 1e12, None).unwrap();
        assert_eq!(model.depth(), 0);
        let rec = model.reconstruct(&x.column(0)).unwrap();
        assert!((rec - x.column(0)).amax() < 1e-3);
    }

    #[test]
    fn batch_matches_per_sample_and_loop_oracle() {
        let x = uniform(7, 15, 0.0, 1.0, 6);
        let model = train_delm(&x, &specs(&[4], 100.0), 1e4, None).unwrap();
        let batch = model.reconstruct_batch(&x).unwrap();
        let errors = model.reconstruction_errors(&x).unwrap();
        for j in 0..x.samples() {
            let col = x.column(j);
            let single = model.reconstruct(&col).unwrap();
            assert!((single - batch.column(j)).amax() < 1e-14);
            let mut expected = 0.0;
            for i in 0..7 {
                let diff = x.as_matrix()[(i, j)] - batch.as_matrix()[(i, j)];
                expected += diff * diff;
            }
            assert!((model.reconstruction_error(&col).unwrap() - expected).abs() < 1e-12);
            assert!((errors[j] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_rejects_wrong_dimension() {
        let model =
            DelmModel::from_weights(vec![DMatrix::zeros(3, 3)], ActivationKind::Sigmoid, None)
                .unwrap();
        assert!(model.reconstruct(&DVector::zeros(4)).is_err());
    }

    #[test]
    fn from_weights_checks_chain() {
        let bad = vec![DMatrix::zeros(3, 5), DMatrix::zeros(5, 4)];
        assert!(DelmModel::from_weights(bad, ActivationKind::Sigmoid, None).is_err());
        let open = vec![DMatrix::zeros(3, 5), DMatrix::zeros(4, 3)];
        assert!(DelmModel::from_weights(open, ActivationKind::Sigmoid, None).is_err());
    }

    #[test]
    fn rejects_unnormalized_input() {
        let x = uniform(4, 10, 0.0, 2.0, 7);
        let err = train_delm(&x, &specs(&[2], 1.0), 1.0, None).unwrap_err();
        assert!(matches!(err, Error::Unnormalized { .. }));
        assert!(err.to_string().contains("normalize"));
    }

    #[test]
    fn solver_choice_follows_widths() {
        let x = uniform(30, 50, 0.0, 1.0, 8);
        let rec = Recorder::default();
        train_delm_observed(
            &x,
            &specs(&[20, 20], 1e6),
            1e18,
            None,
            Refit::AllLayers,
            &rec,
            "g",
        )
        .unwrap();
        let methods: Vec<SolveMethod> = rec.0.lock().unwrap().iter().map(|e| e.1).collect();
        assert_eq!(methods.len(), 3);
        assert_ne!(methods[0], SolveMethod::Procrustes);
        assert_eq!(methods[1], SolveMethod::Procrustes);
        assert_ne!(methods[2], SolveMethod::Procrustes);
    }

    #[test]
    fn init_weights_replace_random_mapping() {
        let x = uniform(16, 60, 0.0, 1.0, 9);
        let global = train_delm(&x, &specs(&[6, 6], 1e6), 1e18, None).unwrap();
        let subset = FeatureMatrix::new(x.as_matrix().columns(0, 20).into_owned()).unwrap();
        let rec = Recorder::default();
        let class = train_delm_observed(
            &subset,
            &specs(&[6, 6], 1e6),
            1e18,
            Some(&global),
            Refit::AllLayers,
            &rec,
            "c",
        )
        .unwrap();
        assert_eq!(class.dims(), global.dims());
        let events = rec.0.lock().unwrap();
        for (layer, _, input, hidden) in events.iter().take(2) {
            let expected = (&global.weights()[*layer] * input).map(|u| 1.0 / (1.0 + (-u).exp()));
            assert_eq!(hidden, &expected);
        }
    }

    #[test]
    fn init_with_wrong_dims_is_rejected() {
        let x = uniform(8, 20, 0.0, 1.0, 10);
        let global = train_delm(&x, &specs(&[4, 4], 1e6), 1e18, None).unwrap();
        assert!(train_delm(&x, &specs(&[5, 5], 1e6), 1e18, Some(&global)).is_err());
    }

    #[test]
    fn small_training_sets_are_memorized() {
        let x = uniform(30, 12, 0.05, 0.95, 11);
        let model = train_delm(&x, &specs(&[20, 20], 1e8), 1e18, None).unwrap();
        assert!(mean_error(&model, &x) / 30.0 <= 1e-2);
    }
}
