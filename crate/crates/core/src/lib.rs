//! Budget-aware staged hyperparameter grid search for small deep
//! feedforward networks on tabular binary-outcome data.
//!
//! The crate is organised bottom-up:
//!
//! - [`dataset`]: schema, CSV ingestion, stratified splits, synthetic data
//! - [`dfnn`]: the network, its optimizers and training loop
//! - [`evaluation`]: rank-based AUC, five-fold cross-validation, refits
//! - [`searchspace`]: grids, pool counting, rank/unrank, neighborhoods
//! - [`campaign`]: the three-stage orchestrator with wall-clock budgets
//! - [`analytics`]: group, mid-point and timing statistics per cycle
//! - [`shap`]: Shapley explanations of models and of hyperparameters
//! - [`fixtures`]: deterministic fixtures and stub models for tests
//!
//! Runnable walkthroughs live in `examples/`; the `gridsmith` binary is a
//! thin command-line front end over the same API.

pub mod analytics;
pub mod campaign;
pub mod cli;
pub mod dataset;
pub mod dfnn;
pub mod evaluation;
pub mod fixtures;
pub mod searchspace;
pub mod seed;
pub mod shap;
