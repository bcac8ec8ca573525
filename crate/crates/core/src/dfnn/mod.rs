//! Deep feedforward network written against `ndarray`: initialization,
//! forward and backward passes, five optimizers, L1/L2 penalties, inverted
//! dropout and the mini-batch training loop. Everything is `f64` and
//! single-threaded per model, so a `(hyperparameters, data, seed)` triple
//! always yields bit-identical weights.

mod hyper;
mod model;
mod optim;
mod train;

pub use hyper::{Activation, Bounds, DfnnHyperparameters, Initializer, Optimizer};
pub use model::{
    init_model, loss, DfnnModel, ForwardCache, ForwardPass, Gradients, Mode, CONSTANT_INIT, LOG_CLAMP,
    MODEL_FORMAT_VERSION,
};
pub use optim::{decayed_rate, OptimizerState, BETA1, BETA2, EPSILON};
pub use train::{train, TrainReport};

#[derive(Debug, thiserror::Error)]
pub enum DfnnError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("non-finite loss after {} update steps", report.update_steps)]
    NonFiniteLoss { model: Box<DfnnModel>, report: TrainReport },
    #[error("model file: {0}")]
    Format(String),
}
