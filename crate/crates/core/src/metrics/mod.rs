//! Prediction-quality and rank-agreement statistics.

mod auc;
mod rank;
mod scott_knott;

pub use auc::auc;
pub use rank::{
    interpret_tau, jaccard_topk, kendall_tau, kendall_w, kendall_w_from_ranks, Agreement,
    RankAgreementReport, TauInterpretation,
};
pub use scott_knott::{scott_knott, ScottKnott, SkEntry, SK_ALPHA};

/// Arithmetic mean; NaN for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1); 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}
