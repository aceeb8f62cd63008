//! Periodized CSV: header `period,label,<feature names...>`, one sample
//! per row, 1-based integer periods, labels 0/1.

use std::path::Path;

use super::{segment_by_period, PeriodizedDataset, Sample};
use crate::error::{Error, Result};

pub fn read_csv(path: &Path) -> Result<PeriodizedDataset> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.len() < 3 || &headers[0] != "period" || &headers[1] != "label" {
        return Err(Error::parse(
            path,
            "expected header `period,label,<features...>`",
        ));
    }
    let feature_names: Vec<String> = headers.iter().skip(2).map(str::to_owned).collect();
    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let rec = result.map_err(|e| Error::csv(path, e))?;
        let line = row + 2;
        let period: i64 = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, format!("line {line}: bad period `{}`", &rec[0])))?;
        let label = match rec[1].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::parse(path, format!("line {line}: bad label `{other}`")));
            }
        };
        let features = rec
            .iter()
            .skip(2)
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(path, format!("line {line}: {e}")))?;
        records.push((period, Sample::labeled(features, label)));
    }
    segment_by_period(records, feature_names)
}

pub fn write_csv(dataset: &PeriodizedDataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut header = vec!["period".to_string(), "label".to_string()];
    header.extend(dataset.feature_names().iter().cloned());
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for (i, period) in dataset.periods().iter().enumerate() {
        for s in period {
            let mut row = Vec::with_capacity(s.dim() + 2);
            row.push((i + 1).to_string());
            row.push(if s.label == Some(true) { "1" } else { "0" }.to_string());
            row.extend(s.features.iter().map(f64::to_string));
            w.write_record(&row).map_err(|e| Error::csv(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
