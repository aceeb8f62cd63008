//! Agreement between rankings of the same model ids.
//!
//! A ranking is given as its id order, best first.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

fn positions(order: &[usize]) -> Result<HashMap<usize, usize>> {
    let map: HashMap<usize, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    if map.len() != order.len() {
        return Err(Error::InvalidArgument("ranking repeats an id".into()));
    }
    Ok(map)
}

/// Number of inversions, counted by merge sort.
fn inversions(v: &mut [usize]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = inversions(&mut v[..mid]) + inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            merged.push(v[i]);
            i += 1;
        } else {
            merged.push(v[j]);
            count += (mid - i) as u64;
            j += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    count
}

/// Kendall's tau between two strict rankings of the same ids.
///
/// Strict rankings have no ties, so tau-a and tau-b coincide:
/// `(concordant - discordant) / (n (n - 1) / 2)`.
pub fn kendall_tau(r1: &[usize], r2: &[usize]) -> Result<f64> {
    let p2 = positions(r2)?;
    positions(r1)?;
    if r1.len() != r2.len() {
        return Err(Error::IdSetMismatch);
    }
    let n = r1.len();
    if n < 2 {
        return Err(Error::InvalidArgument("tau needs at least 2 ids".into()));
    }
    let mut seq = r1
        .iter()
        .map(|id| p2.get(id).copied().ok_or(Error::IdSetMismatch))
        .collect::<Result<Vec<_>>>()?;
    let pairs = (n * (n - 1) / 2) as f64;
    let discordant = inversions(&mut seq) as f64;
    Ok((pairs - 2.0 * discordant) / pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agreement {
    Weak,
    Moderate,
    Strong,
}

impl std::fmt::Display for Agreement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Agreement::Weak => "Weak",
            Agreement::Moderate => "Moderate",
            Agreement::Strong => "Strong",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauInterpretation {
    pub agreement: Agreement,
    /// Tau was negative and read as 0.
    pub clamped: bool,
}

/// Weak up to 0.3, Moderate up to 0.6, Strong above.
pub fn interpret_tau(tau: f64) -> TauInterpretation {
    let clamped = tau < 0.0;
    let t = tau.max(0.0);
    let agreement = if t <= 0.3 {
        Agreement::Weak
    } else if t <= 0.6 {
        Agreement::Moderate
    } else {
        Agreement::Strong
    };
    TauInterpretation { agreement, clamped }
}

/// Jaccard similarity of the two top-`k` id sets.
pub fn jaccard_topk(r1: &[usize], r2: &[usize], k: usize) -> Result<f64> {
    let s1: HashSet<usize> = r1.iter().copied().collect();
    let s2: HashSet<usize> = r2.iter().copied().collect();
    if s1 != s2 || s1.len() != r1.len() || s2.len() != r2.len() {
        return Err(Error::IdSetMismatch);
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k > r1.len() {
        return Err(Error::KExceedsModelCount { k, n: r1.len() });
    }
    let a: HashSet<usize> = r1[..k].iter().copied().collect();
    let b: HashSet<usize> = r2[..k].iter().copied().collect();
    let inter = a.intersection(&b).count() as f64;
    let union = a.union(&b).count() as f64;
    Ok(inter / union)
}

/// Kendall's W from a judges-by-items matrix of (possibly tied, averaged)
/// ranks, with the usual tie correction in the denominator.
pub fn kendall_w_from_ranks(ranks: &[Vec<f64>]) -> Result<f64> {
    let m = ranks.len();
    if m < 2 {
        return Err(Error::InvalidArgument("W needs at least 2 rankings".into()));
    }
    let n = ranks[0].len();
    if n < 2 {
        return Err(Error::InvalidArgument("W needs at least 2 items".into()));
    }
    if ranks.iter().any(|r| r.len() != n) {
        return Err(Error::IdSetMismatch);
    }
    let sums: Vec<f64> = (0..n).map(|i| ranks.iter().map(|r| r[i]).sum()).collect();
    let mean_sum = sums.iter().sum::<f64>() / n as f64;
    let s: f64 = sums.iter().map(|r| (r - mean_sum).powi(2)).sum();

    let mut tie_term = 0.0;
    for judge in ranks {
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for r in judge {
            *counts.entry(r.to_bits()).or_default() += 1;
        }
        tie_term += counts
            .values()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>();
    }
    let (m, nf) = (m as f64, n as f64);
    let denom = m * m * (nf * nf * nf - nf) - m * tie_term;
    if denom <= 0.0 {
        // every judge ties every item
        return Ok(1.0);
    }
    Ok(12.0 * s / denom)
}

/// Kendall's W across strict rankings of the same ids.
pub fn kendall_w(orders: &[Vec<usize>]) -> Result<f64> {
    let Some(first) = orders.first() else {
        return Err(Error::InvalidArgument("W needs at least 2 rankings".into()));
    };
    let mut ids = first.clone();
    ids.sort_unstable();
    let ranks = orders
        .iter()
        .map(|order| {
            let pos = positions(order)?;
            if pos.len() != ids.len() {
                return Err(Error::IdSetMismatch);
            }
            ids.iter()
                .map(|id| pos.get(id).map(|p| (*p + 1) as f64).ok_or(Error::IdSetMismatch))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    kendall_w_from_ranks(&ranks)
}

/// Tau, its reading, and top-k overlaps of a ranking against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct RankAgreementReport {
    pub kendall_tau: f64,
    pub tau_interpretation: TauInterpretation,
    pub jaccard_k: BTreeMap<usize, f64>,
}

impl RankAgreementReport {
    /// `ks` larger than the model count are left out.
    pub fn compute(ranking: &[usize], reference: &[usize], ks: &[usize]) -> Result<Self> {
        let tau = kendall_tau(ranking, reference)?;
        let mut jaccard_k = BTreeMap::new();
        for &k in ks {
            if k <= ranking.len() {
                jaccard_k.insert(k, jaccard_topk(ranking, reference, k)?);
            }
        }
        Ok(RankAgreementReport {
            kendall_tau: tau,
            tau_interpretation: interpret_tau(tau),
            jaccard_k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tau_examples() {
        assert_eq!(kendall_tau(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1, 2, 3, 4], &[4, 3, 2, 1]).unwrap(), -1.0);
        let t = kendall_tau(&[1, 2, 3], &[1, 3, 2]).unwrap();
        assert!((t - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(kendall_tau(&[1, 2], &[1, 3]), Err(Error::IdSetMismatch)));
    }

    #[test]
    fn tau_thresholds() {
        assert_eq!(interpret_tau(0.30).agreement, Agreement::Weak);
        assert_eq!(interpret_tau(0.45).agreement, Agreement::Moderate);
        assert_eq!(interpret_tau(0.61).agreement, Agreement::Strong);
        assert_eq!(interpret_tau(0.6).agreement, Agreement::Moderate);
        let neg = interpret_tau(-0.4);
        assert_eq!(neg.agreement, Agreement::Weak);
        assert!(neg.clamped);
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard_topk(&[1, 2, 3, 4], &[3, 1, 2, 4], 3).unwrap(), 1.0);
        assert_eq!(jaccard_topk(&[1, 2, 3, 4, 5, 6], &[4, 5, 6, 1, 2, 3], 3).unwrap(), 0.0);
        assert_eq!(jaccard_topk(&[1, 2, 3, 4], &[2, 3, 4, 1], 3).unwrap(), 0.5);
        assert!(matches!(
            jaccard_topk(&[1, 2], &[2, 1], 3),
            Err(Error::KExceedsModelCount { k: 3, n: 2 })
        ));
    }

    #[test]
    fn w_examples() {
        let same = vec![vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 3]];
        assert!((kendall_w(&same).unwrap() - 1.0).abs() < 1e-15);
        let opposed = vec![vec![1, 2, 3], vec![3, 2, 1]];
        assert_eq!(kendall_w(&opposed).unwrap(), 0.0);
        // Rank sums 4, 6, 8 over m = 3 judges, n = 3 items:
        // S = 8, W = 12 * 8 / (9 * 24) = 4/9.
        let three = vec![vec![1, 2, 3], vec![2, 1, 3], vec![1, 3, 2]];
        assert!((kendall_w(&three).unwrap() - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn w_tie_correction() {
        // Two judges tie everything pairwise the same way: complete agreement.
        let ranks = vec![vec![1.5, 1.5, 3.0], vec![1.5, 1.5, 3.0]];
        assert!((kendall_w_from_ranks(&ranks).unwrap() - 1.0).abs() < 1e-12);
    }

    fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn tau_is_symmetric(pair in (2usize..9).prop_flat_map(|n| (perm(n), perm(n)))) {
            let (a, b) = pair;
            prop_assert_eq!(kendall_tau(&a, &b).unwrap(), kendall_tau(&b, &a).unwrap());
            prop_assert_eq!(kendall_tau(&a, &a).unwrap(), 1.0);
        }

        #[test]
        fn jaccard_bounds(pair in (2usize..9).prop_flat_map(|n| (perm(n), perm(n)))) {
            let (a, b) = pair;
            for k in 1..=a.len() {
                let j = jaccard_topk(&a, &b, k).unwrap();
                prop_assert!((0.0..=1.0).contains(&j));
            }
            prop_assert_eq!(jaccard_topk(&a, &b, a.len()).unwrap(), 1.0);
        }

        #[test]
        fn w_ignores_judge_order(judges in (2usize..7).prop_flat_map(|n| prop::collection::vec(perm(n), 2..6))) {
            let w = kendall_w(&judges).unwrap();
            let mut rev = judges.clone();
            rev.reverse();
            prop_assert!((w - kendall_w(&rev).unwrap()).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&w));
        }
    }
}
