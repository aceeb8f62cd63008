use super::{by_score, require_candidates, Candidate, Mechanism, RankEntry, Ranking, RankingFlags};
use crate::data::{labels_of, Sample};
use crate::error::Result;
use crate::metrics::auc;
use crate::par;

fn fixed_order(mechanism: Mechanism, ids: Vec<usize>) -> Ranking {
    Ranking {
        mechanism,
        entries: ids
            .into_iter()
            .map(|model_id| RankEntry {
                model_id,
                score: None,
                leaky: false,
            })
            .collect(),
        flags: RankingFlags::default(),
    }
}

/// The first model, then the rest in ascending id.
pub fn rank_stationary<C: Candidate>(candidates: &[C]) -> Result<Ranking> {
    require_candidates(candidates)?;
    let mut ids: Vec<usize> = candidates.iter().map(Candidate::model_id).collect();
    ids.sort_unstable();
    Ok(fixed_order(Mechanism::Stationary, ids))
}

/// Newest first.
pub fn rank_periodic<C: Candidate>(candidates: &[C]) -> Result<Ranking> {
    require_candidates(candidates)?;
    let mut ids: Vec<usize> = candidates.iter().map(Candidate::model_id).collect();
    ids.sort_unstable_by(|a, b| b.cmp(a));
    Ok(fixed_order(Mechanism::Periodic, ids))
}

/// AUC of every candidate on `samples` (which must be labeled), as
/// `(model_id, auc)`.
pub(crate) fn auc_scores<C: Candidate>(candidates: &[C], samples: &[Sample]) -> Result<Vec<(usize, f64)>> {
    let labels = labels_of(samples)?;
    par::map(candidates, |c| {
        let scores = c.score(samples)?;
        Ok((c.model_id(), auc(&scores, &labels)?))
    })
    .into_iter()
    .collect()
}

/// True AUC on the labeled test period.
pub fn rank_oracle<C: Candidate>(candidates: &[C], labeled_test: &[Sample]) -> Result<Ranking> {
    require_candidates(candidates)?;
    let scored = auc_scores(candidates, labeled_test)?;
    Ok(Ranking {
        mechanism: Mechanism::Oracle,
        entries: by_score(scored, false),
        flags: RankingFlags::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::stub::Stub;

    fn ids(r: &Ranking) -> Vec<usize> {
        r.order()
    }

    fn three() -> Vec<Stub> {
        (1..=3).map(|i| Stub::new(i, i, i + 1, |_| 0.5)).collect()
    }

    #[test]
    fn stationary_and_periodic() {
        assert_eq!(ids(&rank_stationary(&three()).unwrap()), vec![1, 2, 3]);
        assert_eq!(ids(&rank_periodic(&three()).unwrap()), vec![3, 2, 1]);
        let one = vec![Stub::new(1, 1, 2, |_| 0.5)];
        assert_eq!(ids(&rank_stationary(&one).unwrap()), vec![1]);
        assert_eq!(ids(&rank_periodic(&one).unwrap()), vec![1]);
        assert!(rank_stationary::<Stub>(&[]).is_err());
        assert!(rank_periodic::<Stub>(&[]).is_err());
    }

    #[test]
    fn stationary_with_many_records_starts_at_one() {
        let stubs: Vec<Stub> = (1..=14).rev().map(|i| Stub::new(i, i, i, |_| 0.5)).collect();
        assert_eq!(rank_stationary(&stubs).unwrap().top(), 1);
        assert_eq!(rank_periodic(&stubs).unwrap().top(), 14);
    }

    fn test_period() -> Vec<Sample> {
        (0..10)
            .map(|i| Sample::labeled(vec![i as f64], i >= 5))
            .collect()
    }

    #[test]
    fn oracle_orders_by_true_auc() {
        // Model 1 is perfect, model 2 is half right, model 3 is inverted.
        let stubs = vec![
            Stub::new(1, 1, 1, |s| s.features[0] / 10.0),
            Stub::new(2, 2, 2, |s| if s.features[0] < 5.0 { 0.2 } else { 0.2 + (s.features[0] - 5.0) * 0.01 }),
            Stub::new(3, 3, 3, |s| 1.0 - s.features[0] / 10.0),
        ];
        let r = rank_oracle(&stubs, &test_period()).unwrap();
        assert_eq!(ids(&r), vec![1, 2, 3]);
        assert_eq!(r.entries[0].score, Some(1.0));
        assert_eq!(r.entries[2].score, Some(0.0));
    }

    #[test]
    fn oracle_ties_go_to_newest() {
        let stubs = three();
        assert_eq!(ids(&rank_oracle(&stubs, &test_period()).unwrap()), vec![3, 2, 1]);
    }

    #[test]
    fn oracle_rejects_single_class_period() {
        let one_class: Vec<Sample> = (0..4).map(|i| Sample::labeled(vec![i as f64], true)).collect();
        assert!(rank_oracle(&three(), &one_class).is_err());
    }
}
