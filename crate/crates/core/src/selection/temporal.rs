use super::baselines::auc_scores;
use super::{by_recency, by_score, require_candidates, Candidate, HistoryView, Mechanism, Ranking, RankingFlags};
use crate::error::{Error, Result};

/// Score on the last labeled period. Records trained on it cannot be
/// tested there without leakage and go to the tail, newest first.
pub fn rank_tbm<C: Candidate>(candidates: &[C], history: HistoryView<'_>) -> Result<Ranking> {
    temporal(candidates, history, Mechanism::Tbm)
}

/// TBM, but when the winner is the second-newest vintage (its window ends
/// at `t - 2`), the newest record is brought to the top.
pub fn rank_rtbm<C: Candidate>(candidates: &[C], history: HistoryView<'_>) -> Result<Ranking> {
    let mut ranking = temporal(candidates, history, Mechanism::Rtbm)?;
    let last = history.last();
    let window_end = |id: usize| {
        candidates
            .iter()
            .find(|c| c.model_id() == id)
            .map(|c| c.window().end)
    };
    if last >= 2 && window_end(ranking.top()) == Some(last - 1) {
        if let Some(pos) = ranking
            .entries
            .iter()
            .position(|e| window_end(e.model_id) == Some(last))
        {
            let newest = ranking.entries.remove(pos);
            ranking.entries.insert(0, newest);
            ranking.flags.promoted = true;
        }
    }
    Ok(ranking)
}

fn temporal<C: Candidate>(candidates: &[C], history: HistoryView<'_>, mechanism: Mechanism) -> Result<Ranking> {
    require_candidates(candidates)?;
    let last = history.last();
    if last == 0 {
        return Err(Error::Empty("history".into()));
    }
    let (leaky, testable): (Vec<&C>, Vec<&C>) = candidates.iter().partition(|c| c.window().contains(last));
    let leaky_ids: Vec<usize> = leaky.iter().map(|c| c.model_id()).collect();
    let mut flags = RankingFlags {
        reference_period: Some(last),
        ..Default::default()
    };

    let mut entries = match auc_scores(&testable, history.period(last)) {
        Ok(scored) => by_score(scored, false),
        Err(Error::AucUndefined(_)) => {
            flags.recency_fallback = true;
            let all = candidates.iter().map(Candidate::model_id).collect();
            return Ok(Ranking {
                mechanism,
                entries: by_recency(all, false),
                flags,
            });
        }
        Err(e) => return Err(e),
    };
    entries.extend(by_recency(leaky_ids, true));
    Ok(Ranking {
        mechanism,
        entries,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Sample;
    use crate::selection::stub::Stub;

    /// Sixteen labeled periods of ten points each; x in 0..10, label x >= 5.
    fn history() -> Vec<Vec<Sample>> {
        (0..16)
            .map(|_| (0..10).map(|i| Sample::labeled(vec![i as f64], i >= 5)).collect())
            .collect()
    }

    /// Stub whose AUC on the fixture equals `target` (a multiple of 1/25).
    fn with_auc(id: usize, end: usize, target: f64) -> Stub {
        // Negatives score 0.5; the first k positives score below, the rest
        // above, giving AUC (5 - k) / 5.
        let k = ((1.0 - target) * 5.0).round() as usize;
        Stub::new(id, end - 2, end, move |s| {
            let x = s.features[0] as usize;
            if x < 5 {
                0.5
            } else if x - 5 < k {
                0.1
            } else {
                0.9
            }
        })
    }

    #[test]
    fn tbm_fixture_and_rtbm_promotion() {
        let h = history();
        let view = HistoryView::new(&h).unwrap();
        // Vintages 14, 15, 16 (window ends); test period 17.
        let stubs = vec![with_auc(14, 14, 0.6), with_auc(15, 15, 0.8), with_auc(16, 16, 1.0)];
        let tbm = rank_tbm(&stubs, view).unwrap();
        assert_eq!(tbm.order(), vec![15, 14, 16]);
        assert!(tbm.entries[2].leaky && tbm.entries[2].score.is_none());
        assert_eq!(tbm.flags.reference_period, Some(16));

        let rtbm = rank_rtbm(&stubs, view).unwrap();
        assert_eq!(rtbm.order(), vec![16, 15, 14]);
        assert!(rtbm.flags.promoted);
    }

    #[test]
    fn rtbm_leaves_old_winner_alone() {
        let h = history();
        let view = HistoryView::new(&h).unwrap();
        let stubs = vec![with_auc(11, 11, 1.0), with_auc(15, 15, 0.6), with_auc(16, 16, 0.8)];
        let tbm = rank_tbm(&stubs, view).unwrap();
        let rtbm = rank_rtbm(&stubs, view).unwrap();
        assert_eq!(tbm.order(), rtbm.order());
        assert!(!rtbm.flags.promoted);
    }

    #[test]
    fn single_record_and_ties() {
        let h = history();
        let view = HistoryView::new(&h).unwrap();
        let one = vec![with_auc(1, 16, 0.6)];
        assert_eq!(rank_tbm(&one, view).unwrap().order(), vec![1]);
        assert_eq!(rank_rtbm(&one, view).unwrap().order(), vec![1]);

        let tied = vec![with_auc(1, 13, 0.8), with_auc(2, 14, 0.8), with_auc(3, 15, 0.8)];
        assert_eq!(rank_tbm(&tied, view).unwrap().order(), vec![3, 2, 1]);
    }

    #[test]
    fn single_class_last_period_falls_back_to_recency() {
        let mut h = history();
        for s in h.last_mut().unwrap() {
            s.label = Some(false);
        }
        let view = HistoryView::new(&h).unwrap();
        let stubs = vec![with_auc(1, 13, 1.0), with_auc(2, 14, 0.6)];
        let r = rank_tbm(&stubs, view).unwrap();
        assert!(r.flags.recency_fallback);
        assert_eq!(r.order(), vec![2, 1]);
    }

    #[test]
    fn empty_history_is_an_error() {
        let h: Vec<Vec<Sample>> = Vec::new();
        let view = HistoryView::new(&h).unwrap();
        assert!(rank_tbm(&[with_auc(1, 3, 1.0)], view).is_err());
    }
}
