//! Scott-Knott clustering of treatment means.
//!
//! Treatments are sorted by mean, then split recursively at the cut that
//! maximizes the between-group sum of squares of the means. A cut is kept
//! when the likelihood-ratio statistic
//!
//! `lambda = pi / (2 (pi - 2)) * B0 / sigma0^2`
//!
//! exceeds the chi-square quantile with `k / (pi - 2)` degrees of freedom
//! at level [`SK_ALPHA`]. `sigma0^2` pools the spread of the `k` means
//! with the error variance of a mean, `s^2 / r`, where `s^2` is the
//! within-treatment variance pooled over all treatments (with `nu` degrees
//! of freedom) and `r` the harmonic mean of the replicate counts.

use std::f64::consts::PI;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::mean;
use crate::error::{Error, Result};

pub const SK_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SkEntry {
    pub name: String,
    pub mean: f64,
    pub n: usize,
    /// 1 is the best (highest-mean) group.
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScottKnott {
    /// Sorted by descending mean.
    pub entries: Vec<SkEntry>,
}

impl ScottKnott {
    pub fn group_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.group)
    }

    pub fn group_count(&self) -> usize {
        self.entries.iter().map(|e| e.group).max().unwrap_or(0)
    }
}

struct Context {
    error_var_of_mean: f64,
    nu: f64,
}

/// p-value of the best cut of `means` (already sorted), with the cut index.
fn best_cut(means: &[f64], ctx: &Context) -> (usize, f64) {
    let k = means.len();
    let total: f64 = means.iter().sum();
    let grand = total / k as f64;
    let mut best = (1, f64::NEG_INFINITY);
    let mut left = 0.0;
    for c in 1..k {
        left += means[c - 1];
        let right = total - left;
        let (k1, k2) = (c as f64, (k - c) as f64);
        let b = left * left / k1 + right * right / k2 - total * total / k as f64;
        if b > best.1 {
            best = (c, b);
        }
    }
    let (cut, b0) = best;
    let spread: f64 = means.iter().map(|m| (m - grand).powi(2)).sum();
    let sigma0 = (spread + ctx.nu * ctx.error_var_of_mean) / (k as f64 + ctx.nu);
    if b0 <= 0.0 || sigma0 <= 0.0 {
        return (cut, 1.0);
    }
    let lambda = PI / (2.0 * (PI - 2.0)) * b0 / sigma0;
    let df = k as f64 / (PI - 2.0);
    let chi = ChiSquared::new(df).expect("positive degrees of freedom");
    (cut, chi.sf(lambda))
}

fn partition(means: &[f64], offset: usize, ctx: &Context, cuts: &mut Vec<usize>) {
    if means.len() < 2 {
        return;
    }
    let (cut, p) = best_cut(means, ctx);
    if p < SK_ALPHA {
        partition(&means[..cut], offset, ctx, cuts);
        cuts.push(offset + cut);
        partition(&means[cut..], offset + cut, ctx, cuts);
    }
}

/// Group treatments into statistically distinct clusters.
///
/// Ties in mean are ordered by name so the result does not depend on
/// input order.
pub fn scott_knott<S: AsRef<str>>(treatments: &[(S, Vec<f64>)]) -> Result<ScottKnott> {
    if treatments.is_empty() {
        return Err(Error::Empty("no treatments".into()));
    }
    for (name, obs) in treatments {
        if obs.is_empty() {
            return Err(Error::Empty(format!("treatment `{}`", name.as_ref())));
        }
        if obs.len() < 2 {
            return Err(Error::NotEnoughSamples(format!(
                "treatment `{}` has a single observation",
                name.as_ref()
            )));
        }
    }
    let mut entries: Vec<SkEntry> = treatments
        .iter()
        .map(|(name, obs)| SkEntry {
            name: name.as_ref().to_owned(),
            mean: mean(obs),
            n: obs.len(),
            group: 1,
        })
        .collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .mean
            .total_cmp(&entries[a].mean)
            .then_with(|| entries[a].name.cmp(&entries[b].name))
    });

    let mut sse = 0.0;
    let mut nu = 0.0;
    let mut inv_n = 0.0;
    for (e, (_, obs)) in entries.iter().zip(treatments) {
        sse += obs.iter().map(|x| (x - e.mean).powi(2)).sum::<f64>();
        nu += (obs.len() - 1) as f64;
        inv_n += 1.0 / obs.len() as f64;
    }
    let harmonic_n = entries.len() as f64 / inv_n;
    let ctx = Context {
        error_var_of_mean: if nu > 0.0 { sse / nu / harmonic_n } else { 0.0 },
        nu,
    };

    let sorted: Vec<SkEntry> = order.iter().map(|&i| entries[i].clone()).collect();
    let means: Vec<f64> = sorted.iter().map(|e| e.mean).collect();
    let mut cuts = Vec::new();
    partition(&means, 0, &ctx, &mut cuts);

    entries = sorted;
    let mut group = 1;
    let mut next_cut = cuts.iter().peekable();
    for (i, e) in entries.iter_mut().enumerate() {
        if next_cut.peek() == Some(&&i) {
            group += 1;
            next_cut.next();
        }
        e.group = group;
    }
    Ok(ScottKnott { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn noisy(center: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::seed::rng(seed);
        (0..n)
            .map(|_| center + 0.01 * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    #[test]
    fn identical_lists_form_one_group() {
        let obs = vec![0.7, 0.8, 0.75, 0.72];
        let sk = scott_knott(&[("a", obs.clone()), ("b", obs)]).unwrap();
        assert_eq!(sk.group_count(), 1);
    }

    #[test]
    fn single_treatment() {
        let sk = scott_knott(&[("only", vec![0.1, 0.2])]).unwrap();
        assert_eq!(sk.group_of("only"), Some(1));
    }

    #[test]
    fn separated_treatments_split() {
        let sk = scott_knott(&[("low", noisy(0.5, 30, 1)), ("high", noisy(0.9, 30, 2))]).unwrap();
        assert_eq!(sk.group_of("high"), Some(1));
        assert_eq!(sk.group_of("low"), Some(2));
    }

    #[test]
    fn three_levels() {
        let sk = scott_knott(&[
            ("a", noisy(0.9, 20, 1)),
            ("b", noisy(0.9, 20, 2)),
            ("c", noisy(0.7, 20, 3)),
            ("d", noisy(0.5, 20, 4)),
        ])
        .unwrap();
        assert_eq!(sk.group_of("a"), sk.group_of("b"));
        assert_eq!(sk.group_of("c"), Some(2));
        assert_eq!(sk.group_of("d"), Some(3));
    }

    #[test]
    fn order_invariant() {
        let t = vec![
            ("x".to_string(), noisy(0.6, 10, 5)),
            ("y".to_string(), noisy(0.61, 10, 6)),
            ("z".to_string(), noisy(0.8, 10, 7)),
        ];
        let mut rev = t.clone();
        rev.reverse();
        assert_eq!(scott_knott(&t).unwrap(), scott_knott(&rev).unwrap());
    }

    #[test]
    fn empty_treatment_errors() {
        assert!(matches!(scott_knott(&[("a", vec![])]), Err(Error::Empty(_))));
    }
}
