//! Hausdorff distance between point sets.

use rand::seq::index;

use crate::error::{Error, Result};
use crate::{par, seed};

/// Points kept per set before the quadratic pass.
pub const DEFAULT_HAUSDORFF_CAP: usize = 2000;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Largest squared distance from a point of `a` to its nearest point of `b`.
fn directed_sq(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    par::map(a, |p| {
        let mut best = f64::INFINITY;
        for q in b {
            let d = sq_dist(p, q);
            if d < best {
                best = d;
                if best == 0.0 {
                    break;
                }
            }
        }
        best
    })
    .into_iter()
    .fold(0.0, f64::max)
}

fn check(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("point set".into()));
    }
    let dim = a[0].len();
    if let Some(bad) = a.iter().chain(b).find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    Ok(())
}

/// Exact Euclidean Hausdorff distance.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    check(a, b)?;
    Ok(directed_sq(a, b).max(directed_sq(b, a)).sqrt())
}

/// Uniform subsample of at most `cap` points, order preserved.
pub fn subsample(points: &[Vec<f64>], cap: usize, rng_seed: u64) -> Vec<&[f64]> {
    if points.len() <= cap {
        return points.iter().map(Vec::as_slice).collect();
    }
    let mut picked = index::sample(&mut seed::rng(rng_seed), points.len(), cap).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| points[i].as_slice()).collect()
}

/// Hausdorff distance after capping each set at `cap` points. Each set is
/// subsampled with its own seed so a set's subsample does not depend on
/// what it is compared against.
pub fn hausdorff_distance_capped(
    a: &[Vec<f64>],
    seed_a: u64,
    b: &[Vec<f64>],
    seed_b: u64,
    cap: usize,
) -> Result<f64> {
    check(a, b)?;
    if cap == 0 {
        return Err(Error::InvalidArgument("subsample cap must be positive".into()));
    }
    if a.len() <= cap && b.len() <= cap {
        return hausdorff_distance(a, b);
    }
    let a: Vec<Vec<f64>> = subsample(a, cap, seed_a).into_iter().map(<[f64]>::to_vec).collect();
    let b: Vec<Vec<f64>> = subsample(b, cap, seed_b).into_iter().map(<[f64]>::to_vec).collect();
    hausdorff_distance(&a, &b)
}
