use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{generate_drift_stream, read_csv, DriftScenario, PeriodizedDataset};
use crate::error::{Error, Result};
use crate::learners::{Family, LearnerSpec};
use crate::registry::{RegistryConfig, SpecChoice};
use crate::selection::{Mechanism, SelectionOptions, DEFAULT_HAUSDORFF_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// Periodized CSV (`period,label,<features>`).
    Csv(PathBuf),
    Scenario(DriftScenario),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tuning {
    pub budget: usize,
    pub folds: usize,
    /// Search again on every window instead of only the first.
    pub per_window: bool,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            budget: 20,
            folds: 3,
            per_window: false,
        }
    }
}

/// Everything needed to reproduce an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub family: Family,
    #[serde(default = "all_mechanisms")]
    pub mechanisms: Vec<Mechanism>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tuning: Tuning,
    /// Fixed hyperparameters; disables tuning when set.
    #[serde(default)]
    pub spec: Option<LearnerSpec>,
    #[serde(default = "default_jaccard_k")]
    pub jaccard_k: Vec<usize>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_cap")]
    pub hausdorff_cap: usize,
    #[serde(default = "default_ratio")]
    pub downsample_ratio: f64,
    #[serde(default = "default_skip_rate")]
    pub downsample_skip_rate: f64,
}

fn all_mechanisms() -> Vec<Mechanism> {
    Mechanism::ALL.to_vec()
}

fn default_repeats() -> usize {
    20
}

fn default_jaccard_k() -> Vec<usize> {
    vec![3]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_cap() -> usize {
    DEFAULT_HAUSDORFF_CAP
}

fn default_ratio() -> f64 {
    10.0
}

fn default_skip_rate() -> f64 {
    0.25
}

impl ExperimentConfig {
    /// Defaults for everything but the data and the learner family.
    pub fn new(dataset: DatasetSource, family: Family) -> Self {
        ExperimentConfig {
            dataset,
            family,
            mechanisms: all_mechanisms(),
            repeats: default_repeats(),
            seed: 0,
            tuning: Tuning::default(),
            spec: None,
            jaccard_k: default_jaccard_k(),
            output_dir: default_output_dir(),
            hausdorff_cap: default_cap(),
            downsample_ratio: default_ratio(),
            downsample_skip_rate: default_skip_rate(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a TOML file. Relative CSV and output paths are taken relative
    /// to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = toml::from_str::<ExperimentConfig>(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let DatasetSource::Csv(csv) = &mut cfg.dataset {
            if csv.is_relative() {
                *csv = base.join(&*csv);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.mechanisms.is_empty() {
            return bad("mechanism list is empty".into());
        }
        let unique: BTreeSet<_> = self.mechanisms.iter().collect();
        if unique.len() != self.mechanisms.len() {
            return bad("mechanism listed twice".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.jaccard_k.contains(&0) {
            return bad("jaccard k must be at least 1".into());
        }
        if self.hausdorff_cap == 0 {
            return bad("hausdorff_cap must be at least 1".into());
        }
        if self.spec.is_none() && (self.tuning.budget == 0 || self.tuning.folds < 2) {
            return bad("tuning needs budget >= 1 and folds >= 2".into());
        }
        if let Some(spec) = &self.spec {
            if spec.family() != self.family {
                return bad(format!("spec is {} but family is {}", spec.family(), self.family));
            }
            spec.validate()?;
        }
        if !(self.downsample_ratio > 0.0) || !(0.0..=0.5).contains(&self.downsample_skip_rate) {
            return bad("downsample_ratio must be > 0 and downsample_skip_rate in [0, 0.5]".into());
        }
        if let DatasetSource::Scenario(s) = &self.dataset {
            s.validate()?;
        }
        Ok(())
    }

    /// Read or generate the stream; its period count must be even.
    pub fn load_dataset(&self) -> Result<PeriodizedDataset> {
        let ds = match &self.dataset {
            DatasetSource::Csv(path) => read_csv(path)?,
            DatasetSource::Scenario(s) => generate_drift_stream(s)?,
        };
        if ds.period_count() % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "dataset has {} periods; an even count is required",
                ds.period_count()
            )));
        }
        Ok(ds)
    }

    pub fn registry_config(&self) -> RegistryConfig {
        let spec = match &self.spec {
            Some(s) => SpecChoice::Fixed(s.clone()),
            None => SpecChoice::Tune {
                budget: self.tuning.budget,
                folds: self.tuning.folds,
                per_window: self.tuning.per_window,
            },
        };
        RegistryConfig {
            family: self.family,
            spec,
            downsample_ratio: self.downsample_ratio,
            downsample_skip_rate: self.downsample_skip_rate,
        }
    }

    pub fn selection_options(&self, run_seed: u64) -> SelectionOptions {
        SelectionOptions {
            hausdorff_cap: self.hausdorff_cap,
            seed: run_seed,
        }
    }

    /// Seed of run `r` (1-based).
    pub fn run_seed(&self, r: usize) -> u64 {
        self.seed ^ r as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
family = "lr"

[dataset.scenario]
kind = "cyclic"
period_count = 8
samples_per_period = 50
positive_rate = 0.3
cycle_length = 2
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.repeats, 20);
        assert_eq!(cfg.mechanisms.len(), 9);
        assert_eq!(cfg.jaccard_k, vec![3]);
        assert_eq!(cfg.tuning, Tuning::default());
        assert_eq!(cfg.hausdorff_cap, 2000);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        cfg.spec = Some(LearnerSpec::default_for(Family::Lr));
        cfg.mechanisms = vec![Mechanism::Sbm, Mechanism::Laf];
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let with = |extra: &str| ExperimentConfig::from_toml_str(&format!("{extra}\n{MINIMAL}"));
        assert!(with("mechanisms = []").is_err());
        assert!(with("mechanisms = [\"best\"]").is_err());
        assert!(with("mechanisms = [\"tbm\", \"tbm\"]").is_err());
        assert!(with("repeats = 0").is_err());
        assert!(with("jaccard_k = [0]").is_err());
        assert!(with("colour = 1").is_err());
        assert!(with("[spec]\nfamily = \"cart\"\nmax_depth = 3\nmin_leaf = 1").is_err());
    }

    #[test]
    fn csv_source_parses() {
        let cfg = ExperimentConfig::from_toml_str("family = \"rf\"\n[dataset]\ncsv = \"d.csv\"").unwrap();
        assert_eq!(cfg.dataset, DatasetSource::Csv(PathBuf::from("d.csv")));
    }

    #[test]
    fn run_seeds_differ() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_ne!(cfg.run_seed(1), cfg.run_seed(2));
    }
}
