use super::{by_score, require_candidates, Candidate, Mechanism, Ranking, RankingFlags, TestContext};
use crate::error::Result;
use crate::metrics::mean;
use crate::par;

/// Mean confidence in the predicted class, `max(p, 1 - p)`.
pub fn confidence(probs: &[f64]) -> f64 {
    let c: Vec<f64> = probs.iter().map(|&p| p.max(1.0 - p)).collect();
    mean(&c)
}

/// Rank by mean predicted-class confidence on the test samples.
pub fn rank_crc<C: Candidate>(candidates: &[C], context: &TestContext) -> Result<Ranking> {
    require_candidates(candidates)?;
    let scored = par::map(candidates, |c| {
        Ok((c.model_id(), confidence(&c.score(context.samples())?)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Ranking {
        mechanism: Mechanism::Crc,
        entries: by_score(scored, false),
        flags: RankingFlags::default(),
    })
}
