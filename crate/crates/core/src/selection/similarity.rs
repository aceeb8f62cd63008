//! Similarity-based mechanisms: find the labeled period closest to the
//! test data and rank models by their AUC there.

use super::baselines::auc_scores;
use super::hausdorff::hausdorff_distance_capped;
use super::{
    by_recency, by_score, require_candidates, Candidate, HistoryView, Mechanism, Ranking, RankingFlags,
    SelectionOptions, TestContext,
};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::{par, seed};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceChoice {
    /// Closest period.
    pub period: usize,
    /// `(period, distance)` for every candidate period, ascending period.
    pub distances: Vec<(usize, f64)>,
}

fn project<C: Candidate>(newest: &C, samples: &[Sample]) -> Result<Vec<Vec<f64>>> {
    match newest.scaler() {
        Some(scaler) => samples.iter().map(|s| scaler.transform(&s.features)).collect(),
        None => Ok(samples.iter().map(|s| s.features.clone()).collect()),
    }
}

/// Pick the reference period among those from the end of the earliest
/// training window through the last labeled period. Samples are put in
/// the newest model's scaled space; ties go to the later period.
pub fn choose_reference_period<C: Candidate>(
    candidates: &[C],
    history: HistoryView<'_>,
    context: &TestContext,
    options: &SelectionOptions,
) -> Result<ReferenceChoice> {
    require_candidates(candidates)?;
    let first = candidates.iter().map(|c| c.window().end).min().unwrap_or(1);
    let last = history.last();
    if first > last {
        return Err(Error::InvalidArgument(format!(
            "no labeled period between {first} and {last}"
        )));
    }
    let newest = candidates.iter().max_by_key(|c| c.model_id()).expect("non-empty");
    let stream = seed::derive(options.seed, seed::stream::HAUSDORFF);
    let test_points = project(newest, context.samples())?;
    let test_seed = seed::derive(stream, context.period() as u64);

    let distances = par::map_range(first..last + 1, |p| {
        let points = project(newest, history.period(p))?;
        let d = hausdorff_distance_capped(
            &test_points,
            test_seed,
            &points,
            seed::derive(stream, p as u64),
            options.hausdorff_cap,
        )?;
        Ok((p, d))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let period = distances
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|&(p, _)| p)
        .expect("at least one period");
    Ok(ReferenceChoice { period, distances })
}

/// Models never trained on the reference period first, then the leaky
/// ones, each group by descending AUC there.
pub fn rank_sbm<C: Candidate>(
    candidates: &[C],
    history: HistoryView<'_>,
    context: &TestContext,
    options: &SelectionOptions,
) -> Result<Ranking> {
    similarity(candidates, history, context, options, Mechanism::Sbm)
}

/// SBM without the leakage stratification.
pub fn rank_rsbm<C: Candidate>(
    candidates: &[C],
    history: HistoryView<'_>,
    context: &TestContext,
    options: &SelectionOptions,
) -> Result<Ranking> {
    similarity(candidates, history, context, options, Mechanism::Rsbm)
}

fn similarity<C: Candidate>(
    candidates: &[C],
    history: HistoryView<'_>,
    context: &TestContext,
    options: &SelectionOptions,
    mechanism: Mechanism,
) -> Result<Ranking> {
    let reference = choose_reference_period(candidates, history, context, options)?.period;
    let mut flags = RankingFlags {
        reference_period: Some(reference),
        ..Default::default()
    };
    let scored = match auc_scores(candidates, history.period(reference)) {
        Ok(scored) => scored,
        Err(Error::AucUndefined(_)) => {
            flags.recency_fallback = true;
            let ids = candidates.iter().map(Candidate::model_id).collect();
            return Ok(Ranking {
                mechanism,
                entries: by_recency(ids, false),
                flags,
            });
        }
        Err(e) => return Err(e),
    };

    let leaks = |id: usize| {
        candidates
            .iter()
            .any(|c| c.model_id() == id && c.window().contains(reference))
    };
    let entries = if mechanism == Mechanism::Sbm {
        let (leaky, clean): (Vec<_>, Vec<_>) = scored.into_iter().partition(|(id, _)| leaks(*id));
        let mut entries = by_score(clean, false);
        entries.extend(by_score(leaky, true));
        entries
    } else {
        let mut entries = by_score(scored, false);
        for e in &mut entries {
            e.leaky = leaks(e.model_id);
        }
        entries
    };
    Ok(Ranking {
        mechanism,
        entries,
        flags,
    })
}
