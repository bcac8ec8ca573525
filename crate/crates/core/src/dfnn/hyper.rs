use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DfnnError;

macro_rules! categorical {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $label:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            /// Declaration order; also the ordinal encoding.
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $label),+
                }
            }

            pub fn ordinal(self) -> usize {
                Self::ALL.iter().position(|&v| v == self).expect("variant listed in ALL")
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = DfnnError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let lower = s.trim().trim_matches('\'').to_ascii_lowercase();
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == lower)
                    .ok_or_else(|| DfnnError::InvalidHyperparameters(format!(
                        "unknown {} `{}`", stringify!($name), s
                    )))
            }
        }
    };
}

categorical!(
    /// Hidden-layer activation. All hidden layers share one activation.
    Activation {
        Relu => "relu",
        Sigmoid => "sigmoid",
        Softmax => "softmax",
        Tanh => "tanh",
    }
);

categorical!(
    /// Kernel (weight) initializer.
    Initializer {
        Constant => "constant",
        GlorotNormal => "glorot_normal",
        GlorotUniform => "glorot_uniform",
        HeNormal => "he_normal",
        HeUniform => "he_uniform",
    }
);

categorical!(
    Optimizer {
        Sgd => "sgd",
        Adam => "adam",
        Adagrad => "adagrad",
        Nadam => "nadam",
        Adamax => "adamax",
    }
);

/// The thirteen adjustable hyperparameters. The number of hidden layers is
/// `nodes.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfnnHyperparameters {
    pub nodes: Vec<u32>,
    pub af: Activation,
    pub ki: Initializer,
    pub opt: Optimizer,
    pub lr: f64,
    pub mom: f64,
    pub decay: f64,
    pub dropout: f64,
    pub epochs: u32,
    pub batch_size: u32,
    pub l1: f64,
    pub l2: f64,
}

impl DfnnHyperparameters {
    pub fn nhl(&self) -> usize {
        self.nodes.len()
    }

    /// Total hidden width, the scalar used for the structural pair when
    /// hyperparameters are treated as features.
    pub fn total_hidden_nodes(&self) -> u64 {
        self.nodes.iter().map(|&n| u64::from(n)).sum()
    }

    /// Reject values that no network can be built or trained with.
    /// Campaign-level ranges are checked separately by [`Bounds`].
    pub fn check_trainable(&self) -> Result<(), DfnnError> {
        let bad = |m: String| Err(DfnnError::InvalidHyperparameters(m));
        if !(1..=4).contains(&self.nhl()) {
            return bad(format!("number of hidden layers {} outside 1..=4", self.nhl()));
        }
        if self.nodes.iter().any(|&n| n == 0) {
            return bad("hidden layer with zero nodes".into());
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return bad(format!("learning rate {} must be positive", self.lr));
        }
        if !(0.0..1.0).contains(&self.mom) {
            return bad(format!("momentum {} outside [0, 1)", self.mom));
        }
        if !(self.decay.is_finite() && self.decay >= 0.0) {
            return bad(format!("decay {} must be non-negative", self.decay));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return bad("epochs and batch_size must be at least 1".into());
        }
        if !(self.l1.is_finite() && self.l1 >= 0.0 && self.l2.is_finite() && self.l2 >= 0.0) {
            return bad("l1 and l2 must be non-negative".into());
        }
        Ok(())
    }
}

/// Admissible hyperparameter ranges. The defaults are the standard DFNN
/// search ranges; campaigns may widen them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    pub nhl: (usize, usize),
    pub nodes: (u32, u32),
    pub lr: (f64, f64),
    pub mom: (f64, f64),
    pub decay: (f64, f64),
    pub dropout: (f64, f64),
    pub epochs: (u32, u32),
    /// Upper end is additionally capped by the training-set size.
    pub batch_size: (u32, u32),
    pub l1: (f64, f64),
    pub l2: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            nhl: (1, 4),
            nodes: (1, 1005),
            lr: (0.001, 0.3),
            mom: (0.0, 0.9),
            decay: (0.0, 0.1),
            dropout: (0.0, 0.5),
            epochs: (5, 2000),
            batch_size: (1, u32::MAX),
            l1: (0.0, 0.03),
            l2: (0.0, 0.2),
        }
    }
}

impl Bounds {
    pub fn check(&self, hp: &DfnnHyperparameters, case_count: Option<usize>) -> Result<(), DfnnError> {
        hp.check_trainable()?;
        fn within<T: PartialOrd + fmt::Display>(name: &str, v: T, (lo, hi): (T, T)) -> Result<(), DfnnError> {
            if v < lo || v > hi {
                Err(DfnnError::InvalidHyperparameters(format!("{name} = {v} outside [{lo}, {hi}]")))
            } else {
                Ok(())
            }
        }
        within("nhl", hp.nhl(), self.nhl)?;
        for &n in &hp.nodes {
            within("nodes", n, self.nodes)?;
        }
        within("lr", hp.lr, self.lr)?;
        within("mom", hp.mom, self.mom)?;
        within("decay", hp.decay, self.decay)?;
        within("dropout", hp.dropout, self.dropout)?;
        within("epochs", hp.epochs, self.epochs)?;
        let cap = case_count.map_or(self.batch_size.1, |c| self.batch_size.1.min(c as u32));
        within("batch_size", hp.batch_size, (self.batch_size.0, cap))?;
        within("l1", hp.l1, self.l1)?;
        within("l2", hp.l2, self.l2)?;
        Ok(())
    }
}
