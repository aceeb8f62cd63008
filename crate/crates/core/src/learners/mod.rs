//! Binary classifiers with probability outputs, and random-search tuning.
//!
//! Four families are available: logistic regression, CART, random forest
//! and a one-hidden-layer perceptron. All training is deterministic given
//! the seed.

mod forest;
mod logistic;
mod mlp;
mod search;
mod tree;

pub use forest::Forest;
pub use logistic::{logistic_objective, LogisticModel};
pub use mlp::Mlp;
pub use search::{
    cross_val_auc, random_search, random_search_trials, sample_specs, trial_seed, Trial,
};
pub use tree::{Node, Tree, TreeParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{class_counts, Sample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Lr,
    Cart,
    Rf,
    Nn,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Lr, Family::Cart, Family::Rf, Family::Nn];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Lr => "lr",
            Family::Cart => "cart",
            Family::Rf => "rf",
            Family::Nn => "nn",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model family `{s}`")))
    }
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum LearnerSpec {
    Lr {
        learning_rate: f64,
        epochs: usize,
        l2: f64,
    },
    Cart {
        max_depth: usize,
        min_leaf: usize,
    },
    Rf {
        trees: usize,
        max_depth: usize,
        feature_fraction: f64,
    },
    Nn {
        hidden: usize,
        learning_rate: f64,
        epochs: usize,
    },
}

/// Search-space bounds, inclusive.
pub mod space {
    pub const LR_LEARNING_RATE: (f64, f64) = (1e-3, 1.0);
    pub const LR_EPOCHS: (usize, usize) = (50, 500);
    pub const LR_L2: (f64, f64) = (0.0, 1e-1);
    pub const CART_DEPTH: (usize, usize) = (2, 12);
    pub const CART_MIN_LEAF: (usize, usize) = (1, 20);
    pub const RF_TREES: (usize, usize) = (10, 100);
    pub const RF_DEPTH: (usize, usize) = (2, 12);
    /// Feature fractions 0.3, 0.4, ..., 1.0.
    pub const RF_FEATURE_FRACTION_TENTHS: (usize, usize) = (3, 10);
    pub const NN_HIDDEN: (usize, usize) = (4, 64);
    pub const NN_LEARNING_RATE: (f64, f64) = (1e-3, 1e-1);
    pub const NN_EPOCHS: (usize, usize) = (50, 500);
}

impl LearnerSpec {
    pub fn family(&self) -> Family {
        match self {
            LearnerSpec::Lr { .. } => Family::Lr,
            LearnerSpec::Cart { .. } => Family::Cart,
            LearnerSpec::Rf { .. } => Family::Rf,
            LearnerSpec::Nn { .. } => Family::Nn,
        }
    }

    /// A middle-of-the-space default for each family.
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Lr => LearnerSpec::Lr {
                learning_rate: 0.1,
                epochs: 200,
                l2: 1e-3,
            },
            Family::Cart => LearnerSpec::Cart {
                max_depth: 6,
                min_leaf: 5,
            },
            Family::Rf => LearnerSpec::Rf {
                trees: 50,
                max_depth: 8,
                feature_fraction: 0.5,
            },
            Family::Nn => LearnerSpec::Nn {
                hidden: 16,
                learning_rate: 0.05,
                epochs: 100,
            },
        }
    }

    /// Check every hyperparameter against the declared search space.
    pub fn validate(&self) -> Result<()> {
        fn within<T: PartialOrd + fmt::Display>(name: &str, v: T, (lo, hi): (T, T)) -> Result<()> {
            if v >= lo && v <= hi {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} = {v} outside [{lo}, {hi}]")))
            }
        }
        match *self {
            LearnerSpec::Lr {
                learning_rate,
                epochs,
                l2,
            } => {
                within("learning_rate", learning_rate, space::LR_LEARNING_RATE)?;
                within("epochs", epochs, space::LR_EPOCHS)?;
                within("l2", l2, space::LR_L2)
            }
            LearnerSpec::Cart {
                max_depth,
                min_leaf,
            } => {
                within("max_depth", max_depth, space::CART_DEPTH)?;
                within("min_leaf", min_leaf, space::CART_MIN_LEAF)
            }
            LearnerSpec::Rf {
                trees,
                max_depth,
                feature_fraction,
            } => {
                within("trees", trees, space::RF_TREES)?;
                within("max_depth", max_depth, space::RF_DEPTH)?;
                let (lo, hi) = space::RF_FEATURE_FRACTION_TENTHS;
                within("feature_fraction", feature_fraction, (lo as f64 / 10.0, hi as f64 / 10.0))
            }
            LearnerSpec::Nn {
                hidden,
                learning_rate,
                epochs,
            } => {
                within("hidden", hidden, space::NN_HIDDEN)?;
                within("learning_rate", learning_rate, space::NN_LEARNING_RATE)?;
                within("epochs", epochs, space::NN_EPOCHS)
            }
        }
    }
}

/// `key=value` pairs joined by `;`, as written to manifests.
impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LearnerSpec::Lr {
                learning_rate,
                epochs,
                l2,
            } => write!(f, "learning_rate={learning_rate};epochs={epochs};l2={l2}"),
            LearnerSpec::Cart {
                max_depth,
                min_leaf,
            } => write!(f, "max_depth={max_depth};min_leaf={min_leaf}"),
            LearnerSpec::Rf {
                trees,
                max_depth,
                feature_fraction,
            } => write!(
                f,
                "trees={trees};max_depth={max_depth};feature_fraction={feature_fraction}"
            ),
            LearnerSpec::Nn {
                hidden,
                learning_rate,
                epochs,
            } => write!(f, "hidden={hidden};learning_rate={learning_rate};epochs={epochs}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Lr(LogisticModel),
    Cart(Tree),
    Rf(Forest),
    Nn(Mlp),
}

/// A fitted classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    params: Params,
    dim: usize,
    seed: u64,
}

impl TrainedModel {
    pub fn from_params(params: Params, dim: usize, seed: u64) -> Self {
        TrainedModel { params, dim, seed }
    }

    /// Logistic model with fixed coefficients.
    pub fn logistic(weights: Vec<f64>, bias: f64) -> Self {
        let dim = weights.len();
        TrainedModel::from_params(Params::Lr(LogisticModel { weights, bias }), dim, 0)
    }

    pub fn family(&self) -> Family {
        match self.params {
            Params::Lr(_) => Family::Lr,
            Params::Cart(_) => Family::Cart,
            Params::Rf(_) => Family::Rf,
            Params::Nn(_) => Family::Nn,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Probability of the positive class.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let p = match &self.params {
            Params::Lr(m) => m.predict(x),
            Params::Cart(t) => t.predict(x),
            Params::Rf(f) => f.predict(x),
            Params::Nn(n) => n.predict(x),
        };
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn predict_batch(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples.iter().map(|s| self.predict_proba(&s.features)).collect()
    }
}

/// Fit `spec` on labeled, already scaled samples.
pub fn train(spec: &LearnerSpec, samples: &[Sample], rng_seed: u64) -> Result<TrainedModel> {
    let (neg, pos) = class_counts(samples)?;
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let dim = samples[0].dim();
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if let Some(bad) = samples.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let x: Vec<&[f64]> = samples.iter().map(|s| s.features.as_slice()).collect();
    let y: Vec<bool> = samples.iter().map(|s| s.label == Some(true)).collect();
    let params = match *spec {
        LearnerSpec::Lr {
            learning_rate,
            epochs,
            l2,
        } => Params::Lr(LogisticModel::fit(&x, &y, learning_rate, epochs, l2)),
        LearnerSpec::Cart {
            max_depth,
            min_leaf,
        } => Params::Cart(Tree::fit(
            &x,
            &y,
            &TreeParams {
                max_depth,
                min_leaf,
                feature_fraction: 1.0,
            },
            rng_seed,
        )),
        LearnerSpec::Rf {
            trees,
            max_depth,
            feature_fraction,
        } => Params::Rf(Forest::fit(&x, &y, trees, max_depth, feature_fraction, rng_seed)),
        LearnerSpec::Nn {
            hidden,
            learning_rate,
            epochs,
        } => Params::Nn(Mlp::fit(&x, &y, hidden, learning_rate, epochs, rng_seed)),
    };
    Ok(TrainedModel::from_params(params, dim, rng_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn blobs(n: usize, seed: u64) -> Vec<Sample> {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = crate::seed::rng(seed);
        (0..n)
            .map(|i| {
                let y = i % 3 == 0;
                let c = if y { 1.0 } else { -1.0 };
                let x = (0..3)
                    .map(|_| c + rng.sample::<f64, _>(StandardNormal))
                    .collect();
                Sample::labeled(x, y)
            })
            .collect()
    }

    fn small_specs() -> Vec<LearnerSpec> {
        vec![
            LearnerSpec::Lr {
                learning_rate: 0.2,
                epochs: 60,
                l2: 0.01,
            },
            LearnerSpec::Cart {
                max_depth: 4,
                min_leaf: 2,
            },
            LearnerSpec::Rf {
                trees: 10,
                max_depth: 4,
                feature_fraction: 0.6,
            },
            LearnerSpec::Nn {
                hidden: 4,
                learning_rate: 0.05,
                epochs: 50,
            },
        ]
    }

    #[test]
    fn zero_weight_logistic_is_half() {
        let m = TrainedModel::logistic(vec![0.0; 4], 0.0);
        assert_eq!(m.predict_proba(&[3.0, -1.0, 8.0, 0.2]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_and_zero_dim_rejected() {
        let one = vec![Sample::labeled(vec![1.0], true), Sample::labeled(vec![2.0], true)];
        assert!(matches!(
            train(&LearnerSpec::default_for(Family::Lr), &one, 0),
            Err(Error::SingleClass)
        ));
        let empty = vec![Sample::labeled(vec![], true), Sample::labeled(vec![], false)];
        assert!(matches!(
            train(&LearnerSpec::default_for(Family::Cart), &empty, 0),
            Err(Error::ZeroDimension)
        ));
    }

    #[test]
    fn dimension_mismatch_on_predict() {
        let m = train(&LearnerSpec::default_for(Family::Lr), &blobs(30, 1), 0).unwrap();
        assert!(matches!(m.predict_proba(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn all_families_deterministic() {
        let data = blobs(90, 4);
        for spec in small_specs() {
            let a = train(&spec, &data, 17).unwrap();
            let b = train(&spec, &data, 17).unwrap();
            assert_eq!(a, b, "{spec}");
            let pa = a.predict_batch(&data).unwrap();
            let pb = b.predict_batch(&data).unwrap();
            assert!(pa.iter().zip(&pb).all(|(x, y)| x.to_bits() == y.to_bits()));
            let auc = crate::metrics::auc(&pa, &crate::data::labels_of(&data).unwrap()).unwrap();
            assert!(auc > 0.8, "{spec}: training AUC {auc}");
        }
    }

    #[test]
    fn spec_validation_and_display() {
        for f in Family::ALL {
            LearnerSpec::default_for(f).validate().unwrap();
        }
        let bad = LearnerSpec::Cart {
            max_depth: 40,
            min_leaf: 1,
        };
        assert!(bad.validate().is_err());
        assert_eq!(
            LearnerSpec::Cart {
                max_depth: 3,
                min_leaf: 2
            }
            .to_string(),
            "max_depth=3;min_leaf=2"
        );
        assert_eq!("RF".parse::<Family>().unwrap(), Family::Rf);
    }

    #[test]
    fn spec_toml_round_trip() {
        let spec = LearnerSpec::default_for(Family::Rf);
        let text = toml::to_string(&spec).unwrap();
        assert!(text.contains("family = \"rf\""));
        assert_eq!(toml::from_str::<LearnerSpec>(&text).unwrap(), spec);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn probabilities_are_bounded(seed in any::<u64>(), probe in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 1..20)) {
            let data = blobs(40, seed);
            for spec in small_specs() {
                let m = train(&spec, &data, seed).unwrap();
                for x in &probe {
                    let p = m.predict_proba(x).unwrap();
                    prop_assert!((0.0..=1.0).contains(&p));
                }
            }
        }
    }
}
