use std::fs;
use std::path::{Path, PathBuf};

use super::plot::{line_chart, Series};
use super::results::ResultsTable;
use super::summary::{Summary, SummaryRow};
use crate::error::{Error, Result};

/// Per-period series of one summary column, one line per mechanism.
fn series(summary: &Summary, value: impl Fn(&SummaryRow) -> Option<f64>) -> Vec<Series> {
    let mut mechanisms = Vec::new();
    for r in &summary.rows {
        if !mechanisms.contains(&r.mechanism) {
            mechanisms.push(r.mechanism);
        }
    }
    mechanisms
        .into_iter()
        .map(|m| Series {
            name: m.to_string(),
            points: summary
                .per_period(m)
                .filter_map(|r| Some((r.period? as f64, value(r)?)))
                .collect(),
        })
        .collect()
}

/// Write `results.csv`, `rankings.csv`, `summary.csv` and the SVG trend
/// plots into `outdir`, creating it if needed. Returns the written paths.
pub fn emit_report(summary: &Summary, results: &ResultsTable, outdir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    let mut written = Vec::new();
    let mut out = |name: &str| {
        let p = outdir.join(name);
        written.push(p.clone());
        p
    };
    results.write_csv(&out("results.csv"))?;
    results.write_rankings_csv(&out("rankings.csv"))?;
    summary.write_csv(&out("summary.csv"))?;

    let mut charts = vec![
        ("auc.svg".to_string(), "Top-1 AUC".to_string(), "mean AUC".to_string(), series(summary, |r| r.mean_auc)),
        (
            "tau.svg".into(),
            "Kendall's tau vs. oracle".into(),
            "mean tau".into(),
            series(summary, |r| r.mean_tau),
        ),
    ];
    for (i, k) in summary.jaccard_k.iter().enumerate() {
        charts.push((
            format!("jaccard_{k}.svg"),
            format!("Top-{k} Jaccard vs. oracle"),
            format!("mean J{k}"),
            series(summary, |r| r.mean_jaccard[i]),
        ));
    }
    charts.push((
        "kendall_w.svg".into(),
        "Kendall's W across runs".into(),
        "W".into(),
        series(summary, |r| r.kendall_w),
    ));
    for (file, title, label, s) in charts {
        let path = out(&file);
        fs::write(&path, line_chart(&title, &label, &s)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(written)
}
