//! Parameter update rules.
//!
//! All rules take the decayed rate `lr_t = lr / (1 + decay * t)` for the
//! 0-based update step `t`. Momentum is used by SGD only.

use ndarray::{ArrayD, Zip};

use super::hyper::Optimizer;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-7;

#[derive(Debug, Clone)]
enum Slots {
    Sgd { velocity: Vec<ArrayD<f64>> },
    Adagrad { accum: Vec<ArrayD<f64>> },
    Adam { m: Vec<ArrayD<f64>>, v: Vec<ArrayD<f64>> },
    Nadam { m: Vec<ArrayD<f64>>, v: Vec<ArrayD<f64>> },
    Adamax { m: Vec<ArrayD<f64>>, u: Vec<ArrayD<f64>> },
}

/// Per-parameter optimizer state for a fixed list of parameter shapes.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    kind: Optimizer,
    momentum: f64,
    slots: Slots,
    /// Number of updates applied so far.
    steps: u64,
}

impl OptimizerState {
    pub fn new(kind: Optimizer, momentum: f64, shapes: &[Vec<usize>]) -> Self {
        let zeros = || shapes.iter().map(|s| ArrayD::zeros(s.clone())).collect::<Vec<_>>();
        let slots = match kind {
            Optimizer::Sgd => Slots::Sgd { velocity: zeros() },
            Optimizer::Adagrad => Slots::Adagrad { accum: zeros() },
            Optimizer::Adam => Slots::Adam { m: zeros(), v: zeros() },
            Optimizer::Nadam => Slots::Nadam { m: zeros(), v: zeros() },
            Optimizer::Adamax => Slots::Adamax { m: zeros(), u: zeros() },
        };
        Self {
            kind,
            momentum,
            slots,
            steps: 0,
        }
    }

    pub fn kind(&self) -> Optimizer {
        self.kind
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Compute the additive update for every parameter at rate `lr_t`.
    /// Optimizer state advances; parameters are left to the caller.
    pub fn deltas(&mut self, grads: &[ArrayD<f64>], lr_t: f64) -> Vec<ArrayD<f64>> {
        self.steps += 1;
        let t = self.steps as i32;
        let mom = self.momentum;
        let mut out = Vec::with_capacity(grads.len());
        match &mut self.slots {
            Slots::Sgd { velocity } => {
                for (v, g) in velocity.iter_mut().zip(grads) {
                    Zip::from(&mut *v).and(g).for_each(|v, &g| *v = mom * *v - lr_t * g);
                    out.push(v.clone());
                }
            }
            Slots::Adagrad { accum } => {
                for (acc, g) in accum.iter_mut().zip(grads) {
                    let mut d = ArrayD::zeros(g.raw_dim());
                    Zip::from(&mut d).and(&mut *acc).and(g).for_each(|d, a, &g| {
                        *a += g * g;
                        *d = -lr_t * g / (a.sqrt() + EPSILON);
                    });
                    out.push(d);
                }
            }
            Slots::Adam { m, v } => {
                let c1 = 1.0 - BETA1.powi(t);
                let c2 = 1.0 - BETA2.powi(t);
                for ((m, v), g) in m.iter_mut().zip(v.iter_mut()).zip(grads) {
                    let mut d = ArrayD::zeros(g.raw_dim());
                    Zip::from(&mut d).and(&mut *m).and(&mut *v).and(g).for_each(|d, m, v, &g| {
                        *m = BETA1 * *m + (1.0 - BETA1) * g;
                        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                        *d = -lr_t * (*m / c1) / ((*v / c2).sqrt() + EPSILON);
                    });
                    out.push(d);
                }
            }
            Slots::Nadam { m, v } => {
                let c1 = 1.0 - BETA1.powi(t);
                let c1_next = 1.0 - BETA1.powi(t + 1);
                let c2 = 1.0 - BETA2.powi(t);
                for ((m, v), g) in m.iter_mut().zip(v.iter_mut()).zip(grads) {
                    let mut d = ArrayD::zeros(g.raw_dim());
                    Zip::from(&mut d).and(&mut *m).and(&mut *v).and(g).for_each(|d, m, v, &g| {
                        *m = BETA1 * *m + (1.0 - BETA1) * g;
                        *v = BETA2 * *v + (1.0 - BETA2) * g * g;
                        // Nesterov look-ahead on the bias-corrected first moment
                        let m_bar = BETA1 * *m / c1_next + (1.0 - BETA1) * g / c1;
                        *d = -lr_t * m_bar / ((*v / c2).sqrt() + EPSILON);
                    });
                    out.push(d);
                }
            }
            Slots::Adamax { m, u } => {
                let c1 = 1.0 - BETA1.powi(t);
                for ((m, u), g) in m.iter_mut().zip(u.iter_mut()).zip(grads) {
                    let mut d = ArrayD::zeros(g.raw_dim());
                    Zip::from(&mut d).and(&mut *m).and(&mut *u).and(g).for_each(|d, m, u, &g| {
                        *m = BETA1 * *m + (1.0 - BETA1) * g;
                        *u = (BETA2 * *u).max(g.abs());
                        *d = -(lr_t / c1) * *m / (*u + EPSILON);
                    });
                    out.push(d);
                }
            }
        }
        out
    }
}

/// `lr / (1 + decay * step)`.
pub fn decayed_rate(lr: f64, decay: f64, step: u64) -> f64 {
    lr / (1.0 + decay * step as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr0;

    fn minimize_square(kind: Optimizer, momentum: f64) -> f64 {
        let mut w = 1.0f64;
        let mut state = OptimizerState::new(kind, momentum, &[vec![]]);
        for step in 0..100 {
            let g = arr0(2.0 * w).into_dyn();
            let d = state.deltas(&[g], decayed_rate(0.1, 0.0, step));
            w += d[0].first().copied().unwrap();
        }
        w
    }

    #[test]
    fn every_optimizer_shrinks_a_quadratic() {
        for &kind in Optimizer::ALL {
            for mom in [0.0, 0.5, 0.9] {
                let w = minimize_square(kind, mom);
                assert!(w.abs() < 1.0, "{kind} mom {mom}: |w| = {}", w.abs());
            }
        }
    }

    #[test]
    fn sgd_without_momentum_is_plain_gradient_step() {
        let mut s = OptimizerState::new(Optimizer::Sgd, 0.0, &[vec![2]]);
        let g = ndarray::arr1(&[1.0, -2.0]).into_dyn();
        let d = s.deltas(&[g], 0.5);
        assert_eq!(d[0].as_slice().unwrap(), &[-0.5, 1.0]);
    }

    #[test]
    fn first_adam_step_has_magnitude_lr() {
        let mut s = OptimizerState::new(Optimizer::Adam, 0.0, &[vec![1]]);
        let d = s.deltas(&[ndarray::arr1(&[3.0]).into_dyn()], 0.01);
        assert!((d[0][[0]] + 0.01).abs() < 1e-8);
    }

    #[test]
    fn decay_schedule() {
        assert_eq!(decayed_rate(0.1, 0.0, 50), 0.1);
        assert!((decayed_rate(0.1, 0.01, 100) - 0.05).abs() < 1e-15);
    }
}
