//! Labeling-free ranking: majority-vote pseudo-labels refined by a
//! one-coin EM over model accuracies.

use super::{by_recency, by_score, require_candidates, Candidate, Mechanism, Ranking, RankingFlags, TestContext};
use crate::error::{Error, Result};
use crate::par;

/// Probability at or above which a model votes positive.
pub const VOTE_THRESHOLD: f64 = 0.5;

const MAX_ITERATIONS: usize = 100;
const TOLERANCE: f64 = 1e-6;
/// Keeps accuracies off 0 and 1 so every log term stays finite.
const EDGE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabels {
    pub labels: Vec<bool>,
    /// `false` where every model voted the same way.
    pub discriminative: Vec<bool>,
    /// Samples whose vote was split evenly (labeled positive).
    pub ties: usize,
}

/// Majority vote per sample over a models-by-samples vote matrix.
pub fn majority_pseudo_labels(votes: &[Vec<bool>]) -> Result<PseudoLabels> {
    let n = votes.first().map(Vec::len).unwrap_or(0);
    if n == 0 {
        return Err(Error::Empty("vote matrix".into()));
    }
    if let Some(row) = votes.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    let m = votes.len();
    let mut out = PseudoLabels {
        labels: Vec::with_capacity(n),
        discriminative: Vec::with_capacity(n),
        ties: 0,
    };
    for i in 0..n {
        let yes = votes.iter().filter(|r| r[i]).count();
        if 2 * yes == m {
            out.ties += 1;
        }
        out.labels.push(2 * yes >= m);
        out.discriminative.push(yes != 0 && yes != m);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    /// Per-model probability of voting the true label.
    pub accuracy: Vec<f64>,
    /// Probability that a sample is positive.
    pub prior: f64,
    /// Observed-data log-likelihood at the start and after every iteration.
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Log-likelihood and per-sample positive posteriors.
fn e_step(votes: &[Vec<bool>], accuracy: &[f64], prior: f64) -> (f64, Vec<f64>) {
    let n = votes[0].len();
    let mut ll = 0.0;
    let mut post = Vec::with_capacity(n);
    for i in 0..n {
        let mut pos = prior.ln();
        let mut neg = (1.0 - prior).ln();
        for (row, &a) in votes.iter().zip(accuracy) {
            if row[i] {
                pos += a.ln();
                neg += (1.0 - a).ln();
            } else {
                pos += (1.0 - a).ln();
                neg += a.ln();
            }
        }
        let z = log_sum_exp(pos, neg);
        ll += z;
        post.push((pos - z).exp());
    }
    (ll, post)
}

/// One-coin EM: each model has a single accuracy shared by both classes.
/// `init` seeds the accuracies (agreement rate with it) and the prior.
pub fn one_coin_em(votes: &[Vec<bool>], init: &[bool]) -> Result<EmFit> {
    let n = init.len();
    if votes.is_empty() || n == 0 {
        return Err(Error::Empty("vote matrix".into()));
    }
    if let Some(row) = votes.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    let clamp = |x: f64| x.clamp(EDGE, 1.0 - EDGE);
    let soft: Vec<f64> = init.iter().map(|&y| if y { 1.0 } else { 0.0 }).collect();
    let m_step = |post: &[f64]| -> (Vec<f64>, f64) {
        let accuracy = votes
            .iter()
            .map(|row| {
                let agree: f64 = row
                    .iter()
                    .zip(post)
                    .map(|(&v, &q)| if v { q } else { 1.0 - q })
                    .sum();
                clamp(agree / n as f64)
            })
            .collect();
        (accuracy, clamp(post.iter().sum::<f64>() / n as f64))
    };

    let (mut accuracy, mut prior) = m_step(&soft);
    let (mut ll, mut post) = e_step(votes, &accuracy, prior);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (next, next_prior) = m_step(&post);
        let delta = next
            .iter()
            .zip(&accuracy)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        accuracy = next;
        prior = next_prior;
        (ll, post) = e_step(votes, &accuracy, prior);
        trace.push(ll);
        if delta < TOLERANCE {
            converged = true;
            break;
        }
    }
    Ok(EmFit {
        accuracy,
        prior,
        log_likelihood: trace,
        iterations,
        converged,
    })
}

/// Rank by EM-estimated accuracy on the samples the models disagree on.
pub fn rank_laf<C: Candidate>(candidates: &[C], context: &TestContext) -> Result<Ranking> {
    require_candidates(candidates)?;
    let votes: Vec<Vec<bool>> = par::map(candidates, |c| {
        Ok(c.score(context.samples())?
            .into_iter()
            .map(|p| p >= VOTE_THRESHOLD)
            .collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let pseudo = majority_pseudo_labels(&votes)?;
    let mut flags = RankingFlags {
        vote_ties: pseudo.ties,
        ..Default::default()
    };
    let ids: Vec<usize> = candidates.iter().map(Candidate::model_id).collect();

    let keep: Vec<usize> = (0..pseudo.labels.len()).filter(|&i| pseudo.discriminative[i]).collect();
    if keep.is_empty() {
        flags.laf_fallback = true;
        return Ok(Ranking {
            mechanism: Mechanism::Laf,
            entries: by_recency(ids, false),
            flags,
        });
    }
    let sub: Vec<Vec<bool>> = votes.iter().map(|r| keep.iter().map(|&i| r[i]).collect()).collect();
    let init: Vec<bool> = keep.iter().map(|&i| pseudo.labels[i]).collect();
    let fit = one_coin_em(&sub, &init)?;
    Ok(Ranking {
        mechanism: Mechanism::Laf,
        entries: by_score(ids.into_iter().zip(fit.accuracy).collect(), false),
        flags,
    })
}
