use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::selection::Mechanism;

/// One mechanism's ranking for one testing period of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub run: usize,
    pub period: usize,
    pub mechanism: Mechanism,
    pub top1_model_id: usize,
    /// `None` when the testing period has a single class.
    pub top1_auc: Option<f64>,
    pub tau: Option<f64>,
    /// Aligned with [`ResultsTable::jaccard_k`]; `None` for the first
    /// testing period and when k exceeds the model count.
    pub jaccard: Vec<Option<f64>>,
    pub reference_period: Option<usize>,
    /// Ranking flags plus `single_class` for skipped periods.
    pub flags: String,
    /// Model ids, rank 1 first.
    pub ranking: Vec<usize>,
    pub scores: Vec<Option<f64>>,
    pub leaky: Vec<usize>,
}

impl ResultRow {
    pub fn is_single_class(&self) -> bool {
        self.flags.split(';').any(|f| f == SINGLE_CLASS)
    }
}

pub(crate) const SINGLE_CLASS: &str = "single_class";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    pub jaccard_k: Vec<usize>,
    /// Ordered by run, then period, then mechanism in config order.
    pub rows: Vec<ResultRow>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn join<T, F: Fn(&T) -> String>(items: &[T], f: F) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(" ")
}

impl ResultsTable {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["run", "period", "mechanism", "top1_model_id", "top1_auc", "tau"]
            .map(String::from)
            .to_vec();
        h.extend(self.jaccard_k.iter().map(|k| format!("jaccard_{k}")));
        h.extend(["reference_period", "flags", "ranking", "scores", "leaky"].map(String::from));
        h
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(self.header()).map_err(|e| Error::csv(path, e))?;
        for r in &self.rows {
            let mut rec = vec![
                r.run.to_string(),
                r.period.to_string(),
                r.mechanism.to_string(),
                r.top1_model_id.to_string(),
                opt(&r.top1_auc),
                opt(&r.tau),
            ];
            rec.extend(r.jaccard.iter().map(opt));
            rec.extend([
                opt(&r.reference_period),
                r.flags.clone(),
                join(&r.ranking, ToString::to_string),
                join(&r.scores, |s| s.map(|v| v.to_string()).unwrap_or_else(|| "-".into())),
                join(&r.leaky, ToString::to_string),
            ]);
            w.write_record(rec).map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let mut rd = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let header = rd.headers().map_err(|e| Error::csv(path, e))?.clone();
        let col: BTreeMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h, i)).collect();
        let jaccard_k = header
            .iter()
            .filter_map(|h| h.strip_prefix("jaccard_"))
            .map(|k| k.parse::<usize>().map_err(|_| parse_err(format!("bad column jaccard_{k}"))))
            .collect::<Result<Vec<_>>>()?;
        let table = ResultsTable {
            jaccard_k,
            rows: Vec::new(),
        };
        let expected = table.header();
        if header.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(parse_err(format!("expected header {}", expected.join(","))));
        }

        let mut rows = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            let at = |name: &str| &rec[col[name]];
            let ctx = |what: &str, v: &str| parse_err(format!("row {}: bad {what} `{v}`", line + 1));
            let num = |name: &str| at(name).parse::<usize>().map_err(|_| ctx(name, at(name)));
            let real = |v: &str, what: &str| -> Result<Option<f64>> {
                if v.is_empty() || v == "-" {
                    Ok(None)
                } else {
                    v.parse().map(Some).map_err(|_| ctx(what, v))
                }
            };
            let ids = |name: &str| -> Result<Vec<usize>> {
                at(name)
                    .split_whitespace()
                    .map(|v| v.parse().map_err(|_| ctx(name, v)))
                    .collect()
            };
            rows.push(ResultRow {
                run: num("run")?,
                period: num("period")?,
                mechanism: at("mechanism").parse()?,
                top1_model_id: num("top1_model_id")?,
                top1_auc: real(at("top1_auc"), "top1_auc")?,
                tau: real(at("tau"), "tau")?,
                jaccard: table
                    .jaccard_k
                    .iter()
                    .map(|k| real(at(&format!("jaccard_{k}")), "jaccard"))
                    .collect::<Result<_>>()?,
                reference_period: match at("reference_period") {
                    "" => None,
                    v => Some(v.parse().map_err(|_| ctx("reference_period", v))?),
                },
                flags: at("flags").to_string(),
                ranking: ids("ranking")?,
                scores: at("scores")
                    .split_whitespace()
                    .map(|v| real(v, "scores"))
                    .collect::<Result<_>>()?,
                leaky: ids("leaky")?,
            });
        }
        Ok(ResultsTable { rows, ..table })
    }

    /// Mechanisms in first-seen order.
    pub fn mechanisms(&self) -> Vec<Mechanism> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.mechanism) {
                seen.push(r.mechanism);
            }
        }
        seen
    }

    pub fn runs(&self) -> usize {
        self.rows.iter().map(|r| r.run).max().unwrap_or(0)
    }

    /// `run,period,mechanism,rank,model_id,score,flags`; the flags column
    /// adds `leaky` to entries trained on their scoring period.
    pub fn write_rankings_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["run", "period", "mechanism", "rank", "model_id", "score", "flags"])
            .map_err(|e| Error::csv(path, e))?;
        for r in &self.rows {
            for (i, (&id, score)) in r.ranking.iter().zip(&r.scores).enumerate() {
                let mut flags = r.flags.clone();
                if r.leaky.contains(&id) {
                    if !flags.is_empty() {
                        flags.push(';');
                    }
                    flags.push_str("leaky");
                }
                w.write_record([
                    r.run.to_string(),
                    r.period.to_string(),
                    r.mechanism.to_string(),
                    (i + 1).to_string(),
                    id.to_string(),
                    opt(score),
                    flags,
                ])
                .map_err(|e| Error::csv(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
