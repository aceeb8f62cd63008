use std::collections::BTreeMap;
use std::path::Path;

use super::results::{ResultRow, ResultsTable};
use crate::error::{Error, Result};
use crate::metrics::{interpret_tau, kendall_w, mean, scott_knott, std_dev, ScottKnott};
use crate::selection::Mechanism;

/// Statistics of one mechanism, either for one testing period or pooled
/// over all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// `None` for the pooled row.
    pub period: Option<usize>,
    pub mechanism: Mechanism,
    /// Rows with a defined top-1 AUC.
    pub n: usize,
    pub mean_auc: Option<f64>,
    pub sd_auc: Option<f64>,
    pub mean_tau: Option<f64>,
    pub mean_jaccard: Vec<Option<f64>>,
    /// Agreement of the rankings across runs; the pooled row holds the
    /// mean over periods.
    pub kendall_w: Option<f64>,
    /// Scott-Knott group of the pooled AUCs (pooled row only).
    pub sk_group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub jaccard_k: Vec<usize>,
    pub runs: usize,
    /// Per-period rows (period ascending, mechanisms in table order),
    /// followed by one pooled row per mechanism.
    pub rows: Vec<SummaryRow>,
    pub scott_knott: Option<ScottKnott>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| mean(&v))
}

/// Kendall's W of one mechanism's rankings for one period across runs.
fn agreement(rows: &[&ResultRow]) -> Option<f64> {
    if rows.len() < 2 || rows[0].ranking.len() < 2 || rows.iter().any(|r| r.is_single_class()) {
        return None;
    }
    let orders: Vec<Vec<usize>> = rows.iter().map(|r| r.ranking.clone()).collect();
    kendall_w(&orders).ok()
}

fn stats(
    period: Option<usize>,
    mechanism: Mechanism,
    rows: &[&ResultRow],
    ks: usize,
    kendall_w: Option<f64>,
) -> SummaryRow {
    let valid: Vec<&&ResultRow> = rows.iter().filter(|r| !r.is_single_class()).collect();
    let aucs: Vec<f64> = valid.iter().filter_map(|r| r.top1_auc).collect();
    SummaryRow {
        period,
        mechanism,
        n: aucs.len(),
        mean_auc: (!aucs.is_empty()).then(|| mean(&aucs)),
        sd_auc: (!aucs.is_empty()).then(|| std_dev(&aucs)),
        mean_tau: mean_of(valid.iter().map(|r| r.tau)),
        mean_jaccard: (0..ks).map(|i| mean_of(valid.iter().map(|r| r.jaccard[i]))).collect(),
        kendall_w,
        sk_group: None,
    }
}

/// Per-period and pooled statistics. Single-class testing periods are
/// left out. Scott-Knott pools every run and period of a mechanism.
pub fn aggregate(results: &ResultsTable) -> Result<Summary> {
    if results.rows.is_empty() {
        return Err(Error::Empty("results table".into()));
    }
    let ks = results.jaccard_k.len();
    let mechanisms = results.mechanisms();
    let mut by_cell: BTreeMap<(usize, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in &results.rows {
        let m = mechanisms.iter().position(|&m| m == r.mechanism).expect("listed");
        by_cell.entry((r.period, m)).or_default().push(r);
    }

    let mut rows: Vec<SummaryRow> = by_cell
        .iter()
        .map(|(&(period, m), cell)| stats(Some(period), mechanisms[m], cell, ks, agreement(cell)))
        .collect();

    let mut pooled: Vec<SummaryRow> = mechanisms
        .iter()
        .map(|&m| {
            let all: Vec<&ResultRow> = results.rows.iter().filter(|r| r.mechanism == m).collect();
            let w = mean_of(rows.iter().filter(|s| s.mechanism == m).map(|s| s.kendall_w));
            stats(None, m, &all, ks, w)
        })
        .collect();

    let treatments: Vec<(String, Vec<f64>)> = mechanisms
        .iter()
        .map(|&m| {
            let aucs = results
                .rows
                .iter()
                .filter(|r| r.mechanism == m && !r.is_single_class())
                .filter_map(|r| r.top1_auc)
                .collect();
            (m.to_string(), aucs)
        })
        .collect();
    let sk = if treatments.iter().all(|(_, v)| v.len() >= 2) {
        Some(scott_knott(&treatments)?)
    } else {
        None
    };
    if let Some(sk) = &sk {
        for p in &mut pooled {
            p.sk_group = sk.group_of(p.mechanism.as_str());
        }
    }
    rows.extend(pooled);
    Ok(Summary {
        jaccard_k: results.jaccard_k.clone(),
        runs: results.runs(),
        rows,
        scott_knott: sk,
    })
}

impl Summary {
    pub fn pooled(&self, mechanism: Mechanism) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.period.is_none() && r.mechanism == mechanism)
    }

    pub fn per_period(&self, mechanism: Mechanism) -> impl Iterator<Item = &SummaryRow> {
        self.rows
            .iter()
            .filter(move |r| r.period.is_some() && r.mechanism == mechanism)
    }

    /// `period` is `all` on pooled rows. The W column is omitted when the
    /// table holds a single run.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let with_w = self.runs >= 2;
        let mut header: Vec<String> = ["period", "mechanism", "n", "mean_auc", "sd_auc", "mean_tau", "tau_agreement"]
            .map(String::from)
            .to_vec();
        header.extend(self.jaccard_k.iter().map(|k| format!("mean_jaccard_{k}")));
        if with_w {
            header.push("kendall_w".into());
        }
        header.push("sk_group".into());

        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(&header).map_err(|e| Error::csv(path, e))?;
        for r in &self.rows {
            let mut rec = vec![
                r.period.map(|p| p.to_string()).unwrap_or_else(|| "all".into()),
                r.mechanism.to_string(),
                r.n.to_string(),
                opt(r.mean_auc),
                opt(r.sd_auc),
                opt(r.mean_tau),
                r.mean_tau
                    .map(|t| interpret_tau(t).agreement.to_string())
                    .unwrap_or_default(),
            ];
            rec.extend(r.mean_jaccard.iter().map(|j| opt(*j)));
            if with_w {
                rec.push(opt(r.kendall_w));
            }
            rec.push(r.sk_group.map(|g| g.to_string()).unwrap_or_default());
            w.write_record(rec).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
