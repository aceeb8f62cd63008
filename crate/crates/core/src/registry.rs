//! Sliding-window model population.
//!
//! With `l` periods, record `i` (1-based) is trained on periods
//! `i..=i + l/2 - 1`. At testing period `t` the registry holds the
//! `t - l/2` records whose windows end before `t`.

use std::path::Path;

use crate::data::{
    apply_scaler, downsample_majority, fit_scaler, labels_of, minority_rate, PeriodizedDataset,
    RobustScaler, Sample,
};
use crate::error::{Error, Result};
use crate::learners::{random_search, train, Family, LearnerSpec, TrainedModel};
use crate::metrics::auc;
use crate::{par, seed};

/// Inclusive range of training periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrainingWindow {
    pub start: usize,
    pub end: usize,
}

impl TrainingWindow {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start >= 1 && start <= end);
        TrainingWindow { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Whether period `p` was used for training (evaluating on it leaks).
    pub fn contains(&self, p: usize) -> bool {
        self.start <= p && p <= self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRecord {
    /// 1 is the oldest.
    pub model_id: usize,
    pub model: TrainedModel,
    pub scaler: RobustScaler,
    pub window: TrainingWindow,
    pub spec: LearnerSpec,
    pub seed: u64,
}

impl ModelRecord {
    /// Scale with the record's own scaler, then predict.
    pub fn scores(&self, samples: &[Sample]) -> Result<Vec<f64>> {
        samples
            .iter()
            .map(|s| self.model.predict_proba(&self.scaler.transform(&s.features)?))
            .collect()
    }
}

/// How each record picks its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecChoice {
    Fixed(LearnerSpec),
    Tune {
        budget: usize,
        folds: usize,
        /// Re-run the search on every window instead of only the first.
        per_window: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryConfig {
    pub family: Family,
    pub spec: SpecChoice,
    /// Majority-to-minority ratio after downsampling.
    pub downsample_ratio: f64,
    /// Windows whose minority share is at least this are left alone.
    pub downsample_skip_rate: f64,
}

impl RegistryConfig {
    pub fn fixed(spec: LearnerSpec) -> Self {
        RegistryConfig {
            family: spec.family(),
            spec: SpecChoice::Fixed(spec),
            downsample_ratio: 10.0,
            downsample_skip_rate: 0.25,
        }
    }

    pub fn tuned(family: Family, budget: usize, folds: usize) -> Self {
        RegistryConfig {
            family,
            spec: SpecChoice::Tune {
                budget,
                folds,
                per_window: false,
            },
            downsample_ratio: 10.0,
            downsample_skip_rate: 0.25,
        }
    }

    fn validate(&self) -> Result<()> {
        if let SpecChoice::Fixed(spec) = &self.spec {
            if spec.family() != self.family {
                return Err(Error::InvalidConfig(format!(
                    "spec family {} differs from registry family {}",
                    spec.family(),
                    self.family
                )));
            }
        }
        if !(self.downsample_ratio > 0.0) {
            return Err(Error::InvalidConfig("downsample_ratio must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRegistry {
    records: Vec<ModelRecord>,
    period_count: usize,
}

/// Seed of record `model_id` under a master seed.
pub fn record_seed(master: u64, model_id: usize) -> u64 {
    seed::derive(master, model_id as u64)
}

/// Downsampled (when the window is imbalanced), scaled training set of a
/// window, with the fitted scaler.
fn prepare_window(
    dataset: &PeriodizedDataset,
    window: TrainingWindow,
    cfg: &RegistryConfig,
    rec_seed: u64,
) -> Result<(Vec<Sample>, RobustScaler)> {
    let mut samples = dataset.span(window.start, window.end);
    if minority_rate(&samples)? < cfg.downsample_skip_rate {
        samples = downsample_majority(
            &samples,
            cfg.downsample_ratio,
            seed::derive(rec_seed, seed::stream::DOWNSAMPLE),
        )?;
    }
    let scaler = fit_scaler(&samples)?;
    let scaled = apply_scaler(&scaler, &samples)?;
    Ok((scaled, scaler))
}

fn tune(cfg: &RegistryConfig, budget: usize, folds: usize, scaled: &[Sample], rec_seed: u64) -> Result<LearnerSpec> {
    random_search(
        cfg.family,
        scaled,
        budget,
        folds,
        seed::derive(rec_seed, seed::stream::TUNE),
    )
}

fn build_record(
    dataset: &PeriodizedDataset,
    cfg: &RegistryConfig,
    model_id: usize,
    shared_spec: Option<&LearnerSpec>,
    master_seed: u64,
) -> Result<ModelRecord> {
    let half = dataset.half();
    let window = TrainingWindow::new(model_id, model_id + half - 1);
    let rec_seed = record_seed(master_seed, model_id);
    let (scaled, scaler) = prepare_window(dataset, window, cfg, rec_seed)?;
    let spec = match (&cfg.spec, shared_spec) {
        (_, Some(spec)) => spec.clone(),
        (SpecChoice::Fixed(spec), None) => spec.clone(),
        (SpecChoice::Tune { budget, folds, .. }, None) => tune(cfg, *budget, *folds, &scaled, rec_seed)?,
    };
    let model = train(&spec, &scaled, seed::derive(rec_seed, seed::stream::TRAIN))?;
    Ok(ModelRecord {
        model_id,
        model,
        scaler,
        window,
        spec,
        seed: rec_seed,
    })
}

/// All records available when testing period `t`.
pub fn build_registry_for_period(
    dataset: &PeriodizedDataset,
    cfg: &RegistryConfig,
    t: usize,
    rng_seed: u64,
) -> Result<ModelRegistry> {
    cfg.validate()?;
    let l = dataset.period_count();
    let half = dataset.half();
    if t < half + 1 || t > l {
        return Err(Error::PeriodOutOfRange {
            t,
            low: half + 1,
            high: l,
        });
    }
    let count = t - half;

    // Tune once on the first window and share the winner.
    let shared = match &cfg.spec {
        SpecChoice::Tune {
            budget,
            folds,
            per_window: false,
        } => {
            let rec_seed = record_seed(rng_seed, 1);
            let (scaled, _) = prepare_window(dataset, TrainingWindow::new(1, half), cfg, rec_seed)?;
            Some(tune(cfg, *budget, *folds, &scaled, rec_seed)?)
        }
        _ => None,
    };
    let records = par::map_range(1..count + 1, |id| {
        build_record(dataset, cfg, id, shared.as_ref(), rng_seed)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ModelRegistry {
        records,
        period_count: l,
    })
}

impl ModelRegistry {
    pub fn records(&self) -> &[ModelRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn period_count(&self) -> usize {
        self.period_count
    }

    pub fn family(&self) -> Option<Family> {
        self.records.first().map(|r| r.model.family())
    }

    /// Records available at testing period `t`: those trained strictly
    /// before it.
    pub fn available_at(&self, t: usize) -> &[ModelRecord] {
        let n = self.records.iter().take_while(|r| r.window.end < t).count();
        &self.records[..n]
    }

    /// `model_id,family,window_start,window_end,spec,seed`
    pub fn write_manifest(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["model_id", "family", "window_start", "window_end", "spec", "seed"])
            .map_err(|e| Error::csv(path, e))?;
        for r in &self.records {
            w.write_record([
                r.model_id.to_string(),
                r.spec.family().to_string(),
                r.window.start.to_string(),
                r.window.end.to_string(),
                r.spec.to_string(),
                r.seed.to_string(),
            ])
            .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// AUC of `record` on the labeled period `p`.
pub fn evaluate_on_period(record: &ModelRecord, dataset: &PeriodizedDataset, p: usize) -> Result<f64> {
    if p == 0 || p > dataset.period_count() {
        return Err(Error::InvalidArgument(format!("no period {p}")));
    }
    let samples = dataset.period(p);
    let labels = labels_of(samples)?;
    let scores = record.scores(samples)?;
    auc(&scores, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_drift_stream, DriftKind, DriftScenario};
    use crate::learners::{Node, Params};
    use proptest::prelude::*;

    fn stream(l: usize) -> PeriodizedDataset {
        generate_drift_stream(&DriftScenario::new(DriftKind::Gradual, l, 60, 0.2).with_seed(4)).unwrap()
    }

    fn lr() -> RegistryConfig {
        RegistryConfig::fixed(LearnerSpec::Lr {
            learning_rate: 0.3,
            epochs: 50,
            l2: 0.0,
        })
    }

    #[test]
    fn window_arithmetic() {
        let ds = stream(28);
        let r = build_registry_for_period(&ds, &lr(), 15, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.records()[0].window, TrainingWindow::new(1, 14));
        let r = build_registry_for_period(&ds, &lr(), 28, 1).unwrap();
        assert_eq!(r.len(), 14);
        assert_eq!(r.records()[13].window, TrainingWindow::new(14, 27));
        let ds8 = stream(8);
        let r = build_registry_for_period(&ds8, &lr(), 5, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.records()[0].window, TrainingWindow::new(1, 4));
    }

    #[test]
    fn t_outside_testing_half() {
        let ds = stream(8);
        for t in [0, 4, 9] {
            assert!(matches!(
                build_registry_for_period(&ds, &lr(), t, 1),
                Err(Error::PeriodOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn growth_and_prefix_stability() {
        let ds = stream(10);
        let full = build_registry_for_period(&ds, &lr(), 10, 3).unwrap();
        for t in 6..=10 {
            let r = build_registry_for_period(&ds, &lr(), t, 3).unwrap();
            assert_eq!(r.len(), t - 5);
            assert_eq!(r.records(), full.available_at(t));
        }
        assert_eq!(full, build_registry_for_period(&ds, &lr(), 10, 3).unwrap());
    }

    #[test]
    fn cross_family_rejected() {
        let mut cfg = lr();
        cfg.family = Family::Rf;
        assert!(matches!(
            build_registry_for_period(&stream(8), &cfg, 5, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn tune_once_shares_spec() {
        let ds = stream(8);
        let cfg = RegistryConfig::tuned(Family::Cart, 3, 3);
        let r = build_registry_for_period(&ds, &cfg, 8, 5).unwrap();
        assert!(r.records().windows(2).all(|w| w[0].spec == w[1].spec));
        let mut per = cfg.clone();
        per.spec = SpecChoice::Tune {
            budget: 3,
            folds: 3,
            per_window: true,
        };
        let rp = build_registry_for_period(&ds, &per, 8, 5).unwrap();
        // the first window is tuned identically either way
        assert_eq!(rp.records()[0].spec, r.records()[0].spec);
    }

    #[test]
    fn scaler_is_fitted_on_window_only() {
        let ds = generate_drift_stream(&DriftScenario::new(DriftKind::None, 8, 200, 0.05)).unwrap();
        let r = build_registry_for_period(&ds, &lr(), 8, 2).unwrap();
        let rec = &r.records()[2];
        let expected = fit_scaler(&ds.span(3, 6)).unwrap();
        // 760 negatives against 40 positives: the window is downsampled first
        assert_ne!(rec.scaler, expected);
        let mut cfg = lr();
        cfg.downsample_skip_rate = 0.0;
        let r = build_registry_for_period(&ds, &cfg, 8, 2).unwrap();
        assert_eq!(r.records()[2].scaler, expected);
    }

    #[test]
    fn evaluate_matches_pairwise_oracle() {
        let ds = stream(8);
        let r = build_registry_for_period(&ds, &lr(), 6, 2).unwrap();
        let rec = &r.records()[1];
        let period = ds.period(7);
        let scores = rec.scores(period).unwrap();
        let (mut good, mut total) = (0.0, 0.0);
        for (i, a) in period.iter().enumerate() {
            for (j, b) in period.iter().enumerate() {
                if a.label == Some(true) && b.label == Some(false) {
                    total += 1.0;
                    good += match scores[i].partial_cmp(&scores[j]).unwrap() {
                        std::cmp::Ordering::Greater => 1.0,
                        std::cmp::Ordering::Equal => 0.5,
                        std::cmp::Ordering::Less => 0.0,
                    };
                }
            }
        }
        assert!((evaluate_on_period(rec, &ds, 7).unwrap() - good / total).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_constant_models() {
        let ds = stream(4);
        let scaler = fit_scaler(ds.period(1)).unwrap();
        let mut rec = ModelRecord {
            model_id: 1,
            model: TrainedModel::logistic(vec![0.0; 8], 0.0),
            scaler,
            window: TrainingWindow::new(1, 2),
            spec: LearnerSpec::default_for(Family::Lr),
            seed: 0,
        };
        assert_eq!(evaluate_on_period(&rec, &ds, 3).unwrap(), 0.5);
        // a tree that reads the label back from an indicator feature
        let mut periods = ds.periods().to_vec();
        for s in periods.iter_mut().flatten() {
            s.features[0] = if s.label == Some(true) { 100.0 } else { -100.0 };
        }
        let ds2 = PeriodizedDataset::from_periods(periods, ds.feature_names().to_vec()).unwrap();
        rec.model = TrainedModel::from_params(
            Params::Cart(crate::learners::Tree::from_nodes(vec![
                Node::Split {
                    feature: 0,
                    threshold: 0.0,
                    left: 1,
                    right: 2,
                },
                Node::Leaf {
                    positives: 0,
                    total: 1,
                },
                Node::Leaf {
                    positives: 1,
                    total: 1,
                },
            ])),
            8,
            0,
        );
        rec.scaler = fit_scaler(ds2.period(1)).unwrap();
        assert_eq!(evaluate_on_period(&rec, &ds2, 3).unwrap(), 1.0);
    }

    #[test]
    fn single_class_period() {
        let mut periods = stream(4).periods().to_vec();
        for s in periods[2].iter_mut() {
            s.label = Some(false);
        }
        let ds = PeriodizedDataset::from_periods(periods, crate::data::default_feature_names(8)).unwrap();
        let r = build_registry_for_period(&ds, &lr(), 3, 0).unwrap();
        assert!(matches!(
            evaluate_on_period(&r.records()[0], &ds, 3),
            Err(Error::AucUndefined(_))
        ));
    }

    proptest! {
        #[test]
        fn leakage_predicate(start in 1usize..50, len in 1usize..20, p in 1usize..80) {
            let w = TrainingWindow::new(start, start + len - 1);
            let interval = (w.start..=w.end).contains(&p);
            prop_assert_eq!(w.contains(p), interval);
            prop_assert_eq!(w.len(), len);
        }
    }
}
