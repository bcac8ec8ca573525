use std::time::Instant;

use ndarray::{ArrayView2, Axis, Ix1, Ix2};
use rand::seq::SliceRandom;

use super::model::{init_model, loss, DfnnModel, Mode};
use super::optim::{decayed_rate, OptimizerState};
use super::{DfnnError, DfnnHyperparameters};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs_run: u32,
    /// Full-batch inference-mode objective on the training rows after the
    /// last completed step.
    pub final_loss: f64,
    pub wall_seconds: f64,
    pub update_steps: u64,
    pub diverged: bool,
}

/// Train a fresh network for `hp.epochs` passes over the rows.
///
/// Each epoch reshuffles with a generator derived from `seed`; the last
/// batch of an epoch may be short. A `batch_size` above the row count
/// trains full-batch. If a step produces a non-finite loss, gradient or
/// weight, training stops with the weights of the last finite state and
/// the model is handed back inside [`DfnnError::NonFiniteLoss`].
pub fn train(
    hp: &DfnnHyperparameters,
    rows: ArrayView2<'_, f64>,
    labels: &[u8],
    seed: u64,
) -> Result<(DfnnModel, TrainReport), DfnnError> {
    let started = Instant::now();
    let n = rows.nrows();
    if n == 0 {
        return Err(DfnnError::EmptyTrainingSet);
    }
    if labels.len() != n {
        return Err(DfnnError::ShapeMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let mut model = init_model(hp, rows.ncols(), seed)?;
    let batch_size = (hp.batch_size as usize).min(n);
    let shapes: Vec<Vec<usize>> = model
        .weights
        .iter()
        .map(|w| w.shape().to_vec())
        .chain(model.biases.iter().map(|b| b.shape().to_vec()))
        .collect();
    let mut optimizer = OptimizerState::new(hp.opt, hp.mom, &shapes);
    let mut order: Vec<usize> = (0..n).collect();
    let mut shuffle_rng = rng_from_seed(derive_seed(seed, &["shuffle".into()]));
    let mut dropout_rng = rng_from_seed(derive_seed(seed, &["dropout".into()]));
    let mode = Mode::Train { dropout: hp.dropout };
    let layers = model.weights.len();

    let mut step: u64 = 0;
    let mut epochs_run = 0;
    let mut diverged = false;
    'epochs: for _ in 0..hp.epochs {
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(batch_size) {
            let batch = rows.select(Axis(0), chunk);
            let batch_labels: Vec<u8> = chunk.iter().map(|&i| labels[i]).collect();
            let pass = model.forward(batch.view(), mode, &mut dropout_rng)?;
            let value = loss(&pass.probabilities, &batch_labels, &model, hp.l1, hp.l2)?;
            if !value.is_finite() {
                diverged = true;
                break 'epochs;
            }
            let grads = model.backward(&pass, &batch_labels, hp.l1, hp.l2)?;
            if !grads.is_finite() {
                diverged = true;
                break 'epochs;
            }
            let flat: Vec<_> = grads
                .weights
                .into_iter()
                .map(|g| g.into_dyn())
                .chain(grads.biases.into_iter().map(|g| g.into_dyn()))
                .collect();
            let deltas = optimizer.deltas(&flat, decayed_rate(hp.lr, hp.decay, step));
            let mut updated_w = Vec::with_capacity(layers);
            let mut updated_b = Vec::with_capacity(layers);
            for (l, d) in deltas.into_iter().enumerate() {
                if l < layers {
                    let d = d.into_dimensionality::<Ix2>().expect("weight delta is 2-D");
                    updated_w.push(&model.weights[l] + &d);
                } else {
                    let d = d.into_dimensionality::<Ix1>().expect("bias delta is 1-D");
                    updated_b.push(&model.biases[l - layers] + &d);
                }
            }
            let finite = updated_w.iter().all(|w| w.iter().all(|v| v.is_finite()))
                && updated_b.iter().all(|b| b.iter().all(|v| v.is_finite()));
            if !finite {
                diverged = true;
                break 'epochs;
            }
            model.weights = updated_w;
            model.biases = updated_b;
            step += 1;
        }
        epochs_run += 1;
    }

    let probs = model.predict_proba(rows)?;
    let final_loss = loss(&probs, labels, &model, hp.l1, hp.l2)?;
    let report = TrainReport {
        epochs_run,
        final_loss,
        wall_seconds: started.elapsed().as_secs_f64(),
        update_steps: step,
        diverged,
    };
    if diverged {
        Err(DfnnError::NonFiniteLoss {
            model: Box::new(model),
            report,
        })
    } else {
        Ok((model, report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfnn::{Activation, Initializer, Optimizer};
    use ndarray::Array2;

    fn hp() -> DfnnHyperparameters {
        DfnnHyperparameters {
            nodes: vec![6],
            af: Activation::Relu,
            ki: Initializer::HeUniform,
            opt: Optimizer::Sgd,
            lr: 0.05,
            mom: 0.5,
            decay: 0.0,
            dropout: 0.0,
            epochs: 5,
            batch_size: 10,
            l1: 0.0,
            l2: 0.0,
        }
    }

    fn toy(n: usize) -> (Array2<f64>, Vec<u8>) {
        let rows = Array2::from_shape_fn((n, 3), |(i, j)| ((i * 7 + j * 3) % 5) as f64 / 4.0);
        let labels = (0..n).map(|i| u8::from(rows[[i, 0]] > 0.4)).collect();
        (rows, labels)
    }

    #[test]
    fn update_steps_count_batches() {
        let (rows, labels) = toy(100);
        let (_, report) = train(&hp(), rows.view(), &labels, 1).unwrap();
        assert_eq!(report.update_steps, 50);
        assert_eq!(report.epochs_run, 5);
        let (rows, labels) = toy(95);
        let (_, report) = train(&hp(), rows.view(), &labels, 1).unwrap();
        assert_eq!(report.update_steps, 5 * 10);
    }

    #[test]
    fn oversized_batch_trains_full_batch() {
        let (rows, labels) = toy(30);
        let mut h = hp();
        h.batch_size = 500;
        let (_, report) = train(&h, rows.view(), &labels, 1).unwrap();
        assert_eq!(report.update_steps, 5);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let (rows, labels) = toy(60);
        let mut h = hp();
        h.dropout = 0.3;
        h.opt = Optimizer::Nadam;
        let (a, _) = train(&h, rows.view(), &labels, 42).unwrap();
        let (b, _) = train(&h, rows.view(), &labels, 42).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn divergence_freezes_last_finite_weights() {
        let (rows, labels) = toy(40);
        let mut h = hp();
        h.lr = 1e300;
        h.ki = Initializer::Constant;
        match train(&h, rows.view(), &labels, 3) {
            Err(DfnnError::NonFiniteLoss { model, report }) => {
                assert!(report.diverged);
                assert!(model.weights.iter().flat_map(|w| w.iter()).all(|v| v.is_finite()));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_and_mismatched_inputs() {
        let rows = Array2::<f64>::zeros((0, 3));
        assert!(matches!(train(&hp(), rows.view(), &[], 1), Err(DfnnError::EmptyTrainingSet)));
        let (rows, _) = toy(10);
        assert!(matches!(train(&hp(), rows.view(), &[0; 3], 1), Err(DfnnError::ShapeMismatch { .. })));
    }
}
