use std::collections::HashMap;

use super::config::ExperimentConfig;
use super::results::{ResultRow, ResultsTable, SINGLE_CLASS};
use crate::data::{class_counts, PeriodizedDataset};
use crate::error::Result;
use crate::metrics::{jaccard_topk, kendall_tau};
use crate::par;
use crate::registry::{build_registry_for_period, ModelRecord};
use crate::selection::{rank, rank_periodic, HistoryView, Mechanism, Ranking, TestContext};

/// Load the configured dataset and run every repeat.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultsTable> {
    config.validate()?;
    let dataset = config.load_dataset()?;
    run_on_dataset(config, &dataset)
}

/// Run every repeat on an already loaded dataset. The dataset stays the
/// same across repeats; model seeds change with the run seed.
pub fn run_on_dataset(config: &ExperimentConfig, dataset: &PeriodizedDataset) -> Result<ResultsTable> {
    config.validate()?;
    let runs = par::map_range(1..config.repeats + 1, |r| run_once(config, dataset, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultsTable {
        jaccard_k: config.jaccard_k.clone(),
        rows: runs.into_iter().flatten().collect(),
    })
}

fn run_once(config: &ExperimentConfig, dataset: &PeriodizedDataset, run: usize) -> Result<Vec<ResultRow>> {
    let run_seed = config.run_seed(run);
    let l = dataset.period_count();
    let half = dataset.half();
    // Records only depend on their own window and seed, so the registry for
    // period t is a prefix of the one for the last period.
    let registry = build_registry_for_period(dataset, &config.registry_config(), l, run_seed)?;
    let periods = par::map_range(half + 1..l + 1, |t| {
        evaluate_period(config, dataset, registry.available_at(t), run, t, run_seed)
    });
    Ok(periods.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

fn evaluate_period(
    config: &ExperimentConfig,
    dataset: &PeriodizedDataset,
    candidates: &[ModelRecord],
    run: usize,
    t: usize,
    run_seed: u64,
) -> Result<Vec<ResultRow>> {
    let test = dataset.period(t);
    let history = HistoryView::before(dataset, t);
    let context = TestContext::from_dataset(dataset, t)?;
    let options = config.selection_options(run_seed);
    let (neg, pos) = class_counts(test)?;
    let single_class = neg == 0 || pos == 0;

    let oracle = if single_class {
        let mut r = rank_periodic(candidates)?;
        r.mechanism = Mechanism::Oracle;
        r.flags.recency_fallback = true;
        r
    } else {
        rank(Mechanism::Oracle, candidates, history, &context, Some(test), &options)?
    };
    let true_auc: HashMap<usize, f64> = oracle
        .entries
        .iter()
        .filter_map(|e| e.score.map(|s| (e.model_id, s)))
        .collect();
    let first_period = t == dataset.half() + 1;

    config
        .mechanisms
        .iter()
        .map(|&m| {
            let ranking = if m == Mechanism::Oracle {
                oracle.clone()
            } else {
                rank(m, candidates, history, &context, None, &options)?
            };
            let order = ranking.order();
            let reference = oracle.order();
            let tau = if first_period || single_class {
                None
            } else {
                Some(kendall_tau(&order, &reference)?)
            };
            let jaccard = config
                .jaccard_k
                .iter()
                .map(|&k| {
                    if first_period || single_class || k > order.len() {
                        Ok(None)
                    } else {
                        jaccard_topk(&order, &reference, k).map(Some)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(row(run, t, ranking, &true_auc, tau, jaccard, single_class))
        })
        .collect()
}

fn row(
    run: usize,
    period: usize,
    ranking: Ranking,
    true_auc: &HashMap<usize, f64>,
    tau: Option<f64>,
    jaccard: Vec<Option<f64>>,
    single_class: bool,
) -> ResultRow {
    let top = ranking.top();
    let mut flags = ranking.flags.to_string();
    if single_class {
        if !flags.is_empty() {
            flags.push(';');
        }
        flags.push_str(SINGLE_CLASS);
    }
    ResultRow {
        run,
        period,
        mechanism: ranking.mechanism,
        top1_model_id: top,
        top1_auc: true_auc.get(&top).copied(),
        tau,
        jaccard,
        reference_period: ranking.flags.reference_period,
        flags,
        ranking: ranking.order(),
        scores: ranking.entries.iter().map(|e| e.score).collect(),
        leaky: ranking.entries.iter().filter(|e| e.leaky).map(|e| e.model_id).collect(),
    }
}
