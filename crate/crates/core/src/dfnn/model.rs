use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::hyper::{Activation, DfnnHyperparameters, Initializer};
use super::DfnnError;
use crate::seed::{derive_seed, rng_from_seed};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Value of every weight under the constant initializer.
pub const CONSTANT_INIT: f64 = 0.1;

/// Probability floor inside the cross-entropy logarithm.
pub const LOG_CLAMP: f64 = 1e-12;

/// A fully connected network: `layer_dims = [input, hidden..., 2]`, hidden
/// layers share one activation, the output is a two-node softmax.
///
/// Weight matrices are stored `fan_in x fan_out` so a batch propagates as
/// `rows . W + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DfnnModel {
    pub layer_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Inverted dropout with the given drop probability on hidden layers.
    Train { dropout: f64 },
    Infer,
}

/// Activations retained for backpropagation.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to each layer, after dropout for hidden outputs.
    inputs: Vec<Array2<f64>>,
    /// Post-activation hidden outputs, before dropout.
    hidden: Vec<Array2<f64>>,
    /// Per hidden layer: scaled keep mask, `None` when no dropout applied.
    masks: Vec<Option<Array2<f64>>>,
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// `batch x 2`, rows sum to one.
    pub probabilities: Array2<f64>,
    pub cache: ForwardCache,
}

/// Parameter gradients, shaped like the model's weights and biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    layer_dims: Vec<usize>,
    hidden_activation: Activation,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Build a freshly initialized network. Biases start at zero.
pub fn init_model(hp: &DfnnHyperparameters, input_dim: usize, seed: u64) -> Result<DfnnModel, DfnnError> {
    hp.check_trainable()?;
    if input_dim == 0 {
        return Err(DfnnError::InvalidHyperparameters("input dimension must be at least 1".into()));
    }
    let mut dims = Vec::with_capacity(hp.nhl() + 2);
    dims.push(input_dim);
    dims.extend(hp.nodes.iter().map(|&n| n as usize));
    dims.push(2);

    let mut rng = rng_from_seed(derive_seed(seed, &["init".into()]));
    let mut weights = Vec::with_capacity(dims.len() - 1);
    let mut biases = Vec::with_capacity(dims.len() - 1);
    for pair in dims.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        weights.push(init_kernel(hp.ki, fan_in, fan_out, &mut rng));
        biases.push(Array1::zeros(fan_out));
    }
    Ok(DfnnModel {
        layer_dims: dims,
        hidden_activation: hp.af,
        weights,
        biases,
    })
}

fn init_kernel<R: Rng>(ki: Initializer, fan_in: usize, fan_out: usize, rng: &mut R) -> Array2<f64> {
    let (fi, fo) = (fan_in as f64, fan_out as f64);
    let mut draw_normal = |std: f64| {
        let dist = Normal::new(0.0, std).expect("positive std");
        Array2::from_shape_simple_fn((fan_in, fan_out), || dist.sample(&mut *rng))
    };
    match ki {
        Initializer::Constant => Array2::from_elem((fan_in, fan_out), CONSTANT_INIT),
        Initializer::GlorotNormal => draw_normal((2.0 / (fi + fo)).sqrt()),
        Initializer::HeNormal => draw_normal((2.0 / fi).sqrt()),
        Initializer::GlorotUniform | Initializer::HeUniform => {
            let limit = if ki == Initializer::GlorotUniform {
                (6.0 / (fi + fo)).sqrt()
            } else {
                (6.0 / fi).sqrt()
            };
            let dist = Uniform::new_inclusive(-limit, limit).expect("finite limit");
            Array2::from_shape_simple_fn((fan_in, fan_out), || dist.sample(&mut *rng))
        }
    }
}

fn activate(act: Activation, z: &mut Array2<f64>) {
    match act {
        Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
        Activation::Sigmoid => z.mapv_inplace(|v| 1.0 / (1.0 + (-v).exp())),
        Activation::Tanh => z.mapv_inplace(f64::tanh),
        Activation::Softmax => softmax_rows(z),
    }
}

fn softmax_rows(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// Given `d_out = dL/d(activation)` and the activation output `a`, return
/// `dL/dz`.
fn activation_backward(act: Activation, a: &Array2<f64>, d_out: Array2<f64>) -> Array2<f64> {
    match act {
        Activation::Relu => {
            let mut d = d_out;
            Zip::from(&mut d).and(a).for_each(|g, &v| {
                if v <= 0.0 {
                    *g = 0.0
                }
            });
            d
        }
        Activation::Sigmoid => {
            let mut d = d_out;
            Zip::from(&mut d).and(a).for_each(|g, &s| *g *= s * (1.0 - s));
            d
        }
        Activation::Tanh => {
            let mut d = d_out;
            Zip::from(&mut d).and(a).for_each(|g, &t| *g *= 1.0 - t * t);
            d
        }
        Activation::Softmax => {
            // dz = s * (d - <d, s>) row-wise
            let dot = (&d_out * a).sum_axis(Axis(1)).insert_axis(Axis(1));
            (&d_out - &dot) * a
        }
    }
}

impl DfnnModel {
    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn hidden_layers(&self) -> usize {
        self.layer_dims.len() - 2
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>() + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    fn check_input(&self, batch: &ArrayView2<'_, f64>) -> Result<(), DfnnError> {
        if batch.ncols() != self.input_dim() {
            return Err(DfnnError::ShapeMismatch {
                expected: self.input_dim(),
                found: batch.ncols(),
            });
        }
        Ok(())
    }

    pub fn forward<R: Rng + ?Sized>(
        &self,
        batch: ArrayView2<'_, f64>,
        mode: Mode,
        rng: &mut R,
    ) -> Result<ForwardPass, DfnnError> {
        self.check_input(&batch)?;
        let layers = self.weights.len();
        let mut inputs = Vec::with_capacity(layers);
        let mut hidden = Vec::with_capacity(layers - 1);
        let mut masks = Vec::with_capacity(layers - 1);
        let mut current = batch.to_owned();
        for l in 0..layers {
            let mut z = current.dot(&self.weights[l]) + &self.biases[l];
            inputs.push(current);
            if l + 1 == layers {
                softmax_rows(&mut z);
                return Ok(ForwardPass {
                    probabilities: z,
                    cache: ForwardCache { inputs, hidden, masks },
                });
            }
            activate(self.hidden_activation, &mut z);
            let (out, mask) = match mode {
                Mode::Train { dropout } if dropout > 0.0 => {
                    let keep = 1.0 - dropout;
                    let mask = Array2::from_shape_simple_fn(z.raw_dim(), || {
                        if rng.random::<f64>() < keep {
                            1.0 / keep
                        } else {
                            0.0
                        }
                    });
                    (&z * &mask, Some(mask))
                }
                _ => (z.clone(), None),
            };
            hidden.push(z);
            masks.push(mask);
            current = out;
        }
        unreachable!("loop returns at the output layer")
    }

    /// Inference-mode class probabilities.
    pub fn predict_proba(&self, batch: ArrayView2<'_, f64>) -> Result<Array2<f64>, DfnnError> {
        // infer mode never touches the generator
        let mut rng = rng_from_seed(0);
        Ok(self.forward(batch, Mode::Infer, &mut rng)?.probabilities)
    }

    /// Positive-class probability per row.
    pub fn predict_risk(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>, DfnnError> {
        Ok(self.predict_proba(rows)?.column(1).to_vec())
    }

    /// Sum of `l1 * |w| + l2 * w^2` over kernel weights.
    pub fn penalty(&self, l1: f64, l2: f64) -> f64 {
        if l1 == 0.0 && l2 == 0.0 {
            return 0.0;
        }
        self.weights
            .iter()
            .flat_map(|w| w.iter())
            .map(|&w| l1 * w.abs() + l2 * w * w)
            .sum()
    }

    /// Backpropagate mean cross-entropy plus the weight penalty through a
    /// cached forward pass.
    pub fn backward(
        &self,
        pass: &ForwardPass,
        labels: &[u8],
        l1: f64,
        l2: f64,
    ) -> Result<Gradients, DfnnError> {
        let probs = &pass.probabilities;
        if labels.len() != probs.nrows() {
            return Err(DfnnError::ShapeMismatch {
                expected: probs.nrows(),
                found: labels.len(),
            });
        }
        let batch = probs.nrows() as f64;
        let layers = self.weights.len();
        let mut dz = probs.clone();
        for (mut row, &y) in dz.rows_mut().into_iter().zip(labels) {
            row[y as usize] -= 1.0;
        }
        dz.mapv_inplace(|v| v / batch);

        let mut gw = vec![Array2::zeros((0, 0)); layers];
        let mut gb = vec![Array1::zeros(0); layers];
        for l in (0..layers).rev() {
            let input = &pass.cache.inputs[l];
            let mut g = input.t().dot(&dz);
            if l1 != 0.0 || l2 != 0.0 {
                Zip::from(&mut g).and(&self.weights[l]).for_each(|g, &w| {
                    *g += l1 * sign(w) + 2.0 * l2 * w;
                });
            }
            gw[l] = g;
            gb[l] = dz.sum_axis(Axis(0));
            if l > 0 {
                let mut d_act = dz.dot(&self.weights[l].t());
                if let Some(mask) = &pass.cache.masks[l - 1] {
                    d_act *= mask;
                }
                dz = activation_backward(self.hidden_activation, &pass.cache.hidden[l - 1], d_act);
            }
        }
        Ok(Gradients { weights: gw, biases: gb })
    }

    /// Inference-mode objective and its gradient on a batch.
    pub fn loss_and_gradients(
        &self,
        batch: ArrayView2<'_, f64>,
        labels: &[u8],
        l1: f64,
        l2: f64,
    ) -> Result<(f64, Gradients), DfnnError> {
        let mut rng = rng_from_seed(0);
        let pass = self.forward(batch, Mode::Infer, &mut rng)?;
        let value = loss(&pass.probabilities, labels, self, l1, l2)?;
        let grads = self.backward(&pass, labels, l1, l2)?;
        Ok((value, grads))
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            layer_dims: self.layer_dims.clone(),
            hidden_activation: self.hidden_activation,
            weights: self.weights.iter().map(|w| w.iter().copied().collect()).collect(),
            biases: self.biases.iter().map(|b| b.to_vec()).collect(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DfnnError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| DfnnError::Format(e.to_string()))?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(DfnnError::Format(format!("unsupported format_version {}", file.format_version)));
        }
        let dims = file.layer_dims;
        if dims.len() < 3 || *dims.last().unwrap() != 2 {
            return Err(DfnnError::Format("layer_dims must be [input, hidden..., 2]".into()));
        }
        if file.weights.len() != dims.len() - 1 || file.biases.len() != dims.len() - 1 {
            return Err(DfnnError::Format("layer count mismatch".into()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (l, pair) in dims.windows(2).enumerate() {
            let w = Array2::from_shape_vec((pair[0], pair[1]), file.weights[l].clone())
                .map_err(|e| DfnnError::Format(format!("layer {l} weights: {e}")))?;
            if file.biases[l].len() != pair[1] {
                return Err(DfnnError::Format(format!("layer {l} bias length")));
            }
            weights.push(w);
            biases.push(Array1::from(file.biases[l].clone()));
        }
        Ok(Self {
            layer_dims: dims,
            hidden_activation: file.hidden_activation,
            weights,
            biases,
        })
    }
}

fn sign(w: f64) -> f64 {
    if w > 0.0 {
        1.0
    } else if w < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Mean categorical cross-entropy over the batch plus the kernel-weight
/// penalty.
pub fn loss(probabilities: &Array2<f64>, labels: &[u8], model: &DfnnModel, l1: f64, l2: f64) -> Result<f64, DfnnError> {
    if probabilities.nrows() != labels.len() || probabilities.ncols() != 2 {
        return Err(DfnnError::ShapeMismatch {
            expected: probabilities.nrows(),
            found: labels.len(),
        });
    }
    let n = labels.len().max(1) as f64;
    let data: f64 = probabilities
        .rows()
        .into_iter()
        .zip(labels)
        .map(|(row, &y)| -row[y as usize].max(LOG_CLAMP).ln())
        .sum::<f64>()
        / n;
    Ok(data + model.penalty(l1, l2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfnn::hyper::Optimizer;
    use ndarray::array;

    pub(crate) fn hp(nodes: Vec<u32>, af: Activation, ki: Initializer) -> DfnnHyperparameters {
        DfnnHyperparameters {
            nodes,
            af,
            ki,
            opt: Optimizer::Adam,
            lr: 0.01,
            mom: 0.0,
            decay: 0.0,
            dropout: 0.0,
            epochs: 5,
            batch_size: 10,
            l1: 0.0,
            l2: 0.0,
        }
    }

    #[test]
    fn constant_init_sets_weights_and_zero_biases() {
        let m = init_model(&hp(vec![4, 3], Activation::Relu, Initializer::Constant), 5, 1).unwrap();
        assert_eq!(m.layer_dims, vec![5, 4, 3, 2]);
        assert!(m.weights.iter().flat_map(|w| w.iter()).all(|&w| w == 0.1));
        assert!(m.biases.iter().flat_map(|b| b.iter()).all(|&b| b == 0.0));
    }

    #[test]
    fn glorot_uniform_respects_limit() {
        let m = init_model(&hp(vec![100], Activation::Relu, Initializer::GlorotUniform), 20, 3).unwrap();
        let limit = (6.0f64 / 120.0).sqrt();
        assert!((limit - 0.2236).abs() < 1e-4);
        assert!(m.weights[0].iter().all(|w| w.abs() <= limit));
    }

    #[test]
    fn init_is_deterministic_and_rejects_bad_depth() {
        let h = hp(vec![8, 8], Activation::Tanh, Initializer::HeNormal);
        assert_eq!(init_model(&h, 3, 9).unwrap(), init_model(&h, 3, 9).unwrap());
        assert_ne!(init_model(&h, 3, 9).unwrap(), init_model(&h, 3, 10).unwrap());
        let deep = hp(vec![2; 5], Activation::Tanh, Initializer::HeNormal);
        assert!(matches!(init_model(&deep, 3, 1), Err(DfnnError::InvalidHyperparameters(_))));
        assert!(init_model(&h, 0, 1).is_err());
    }

    #[test]
    fn zero_network_outputs_half() {
        let mut m = init_model(&hp(vec![3], Activation::Relu, Initializer::Constant), 2, 1).unwrap();
        m.weights.iter_mut().for_each(|w| w.fill(0.0));
        let p = m.predict_proba(array![[0.3, 0.9], [1.0, 0.0]].view()).unwrap();
        assert!(p.iter().all(|&v| v == 0.5));
        assert_eq!(m.predict_risk(array![[0.2, 0.2]].view()).unwrap(), vec![0.5]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let m = init_model(&hp(vec![3], Activation::Relu, Initializer::GlorotNormal), 2, 1).unwrap();
        assert!(matches!(
            m.predict_risk(array![[0.1, 0.2, 0.3]].view()),
            Err(DfnnError::ShapeMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn loss_reference_values() {
        let m = init_model(&hp(vec![1], Activation::Relu, Initializer::Constant), 1, 1).unwrap();
        let perfect = array![[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(loss(&perfect, &[0, 1], &m, 0.0, 0.0).unwrap(), 0.0);
        let uniform = array![[0.5, 0.5], [0.5, 0.5]];
        assert!((loss(&uniform, &[0, 1], &m, 0.0, 0.0).unwrap() - 2f64.ln()).abs() < 1e-15);

        let mut single = m.clone();
        single.weights = vec![array![[2.0]], array![[0.0, 0.0]]];
        let l2 = 0.05;
        let penalty = loss(&perfect, &[0, 1], &single, 0.01, l2).unwrap();
        assert!((penalty - (0.02 + l2 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn model_json_round_trips_exactly() {
        let m = init_model(&hp(vec![5, 4], Activation::Sigmoid, Initializer::GlorotNormal), 3, 4).unwrap();
        let text = m.to_json();
        let back = DfnnModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), text);
        assert!(DfnnModel::from_json("{\"format_version\":9}").is_err());
    }
}
