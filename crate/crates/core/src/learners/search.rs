//! Random-search hyperparameter tuning scored by stratified k-fold AUC.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{space, train, Family, LearnerSpec};
use crate::data::{class_counts, Sample};
use crate::error::{Error, Result};
use crate::metrics::auc;
use crate::{par, seed};

/// Draw `budget` specs uniformly from the family's search space.
pub fn sample_specs(family: Family, budget: usize, rng_seed: u64) -> Vec<LearnerSpec> {
    let mut rng = seed::rng(rng_seed);
    (0..budget)
        .map(|_| match family {
            Family::Lr => LearnerSpec::Lr {
                learning_rate: rng.random_range(space::LR_LEARNING_RATE.0..=space::LR_LEARNING_RATE.1),
                epochs: rng.random_range(space::LR_EPOCHS.0..=space::LR_EPOCHS.1),
                l2: rng.random_range(space::LR_L2.0..=space::LR_L2.1),
            },
            Family::Cart => LearnerSpec::Cart {
                max_depth: rng.random_range(space::CART_DEPTH.0..=space::CART_DEPTH.1),
                min_leaf: rng.random_range(space::CART_MIN_LEAF.0..=space::CART_MIN_LEAF.1),
            },
            Family::Rf => LearnerSpec::Rf {
                trees: rng.random_range(space::RF_TREES.0..=space::RF_TREES.1),
                max_depth: rng.random_range(space::RF_DEPTH.0..=space::RF_DEPTH.1),
                feature_fraction: rng.random_range(
                    space::RF_FEATURE_FRACTION_TENTHS.0..=space::RF_FEATURE_FRACTION_TENTHS.1,
                ) as f64
                    / 10.0,
            },
            Family::Nn => LearnerSpec::Nn {
                hidden: rng.random_range(space::NN_HIDDEN.0..=space::NN_HIDDEN.1),
                learning_rate: rng.random_range(space::NN_LEARNING_RATE.0..=space::NN_LEARNING_RATE.1),
                epochs: rng.random_range(space::NN_EPOCHS.0..=space::NN_EPOCHS.1),
            },
        })
        .collect()
}

/// Seed used to cross-validate the `i`-th draw.
pub fn trial_seed(rng_seed: u64, i: usize) -> u64 {
    seed::derive(rng_seed, i as u64 + 1)
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin.
fn stratified_folds(samples: &[Sample], folds: usize, rng_seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(rng_seed);
    let mut fold_of = vec![0; samples.len()];
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..samples.len())
            .filter(|&i| samples[i].label == Some(class))
            .collect();
        idx.shuffle(&mut rng);
        for (k, i) in idx.into_iter().enumerate() {
            fold_of[i] = k % folds;
        }
    }
    fold_of
}

/// Mean held-out AUC of `spec` over stratified folds.
pub fn cross_val_auc(spec: &LearnerSpec, samples: &[Sample], folds: usize, rng_seed: u64) -> Result<f64> {
    if folds < 2 {
        return Err(Error::InvalidArgument("folds must be >= 2".into()));
    }
    let (neg, pos) = class_counts(samples)?;
    if neg.min(pos) < folds {
        return Err(Error::NotEnoughSamples(format!(
            "{folds}-fold CV needs {folds} samples of each class, got {neg} negatives and {pos} positives"
        )));
    }
    let fold_of = stratified_folds(samples, folds, rng_seed);
    let mut total = 0.0;
    for f in 0..folds {
        let (held, fit): (Vec<_>, Vec<_>) = samples
            .iter()
            .zip(&fold_of)
            .partition(|(_, k)| **k == f);
        let fit: Vec<Sample> = fit.into_iter().map(|(s, _)| s.clone()).collect();
        let model = train(spec, &fit, seed::derive(rng_seed, f as u64))?;
        let scores = held
            .iter()
            .map(|(s, _)| model.predict_proba(&s.features))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<bool> = held.iter().map(|(s, _)| s.label == Some(true)).collect();
        total += auc(&scores, &labels)?;
    }
    Ok(total / folds as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub spec: LearnerSpec,
    pub cv_auc: f64,
}

/// Every sampled spec with its CV score, in draw order.
pub fn random_search_trials(
    family: Family,
    train_samples: &[Sample],
    budget: usize,
    folds: usize,
    rng_seed: u64,
) -> Result<Vec<Trial>> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be >= 1".into()));
    }
    let specs = sample_specs(family, budget, rng_seed);
    par::map_range(0..budget, |i| {
        cross_val_auc(&specs[i], train_samples, folds, trial_seed(rng_seed, i))
            .map(|cv_auc| Trial {
                spec: specs[i].clone(),
                cv_auc,
            })
    })
    .into_iter()
    .collect()
}

/// The sampled spec with the best mean CV AUC; ties go to the earliest draw.
pub fn random_search(
    family: Family,
    train_samples: &[Sample],
    budget: usize,
    folds: usize,
    rng_seed: u64,
) -> Result<LearnerSpec> {
    let trials = random_search_trials(family, train_samples, budget, folds, rng_seed)?;
    let mut best = &trials[0];
    for t in &trials[1..] {
        if t.cv_auc > best.cv_auc {
            best = t;
        }
    }
    Ok(best.spec.clone())
}
