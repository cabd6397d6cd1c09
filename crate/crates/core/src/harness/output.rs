use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::{Decision, Label, Outcome, Point};

pub const CSV_HEADER: [&str; 6] = ["trial", "round", "point", "decision", "truth", "outcome"];

/// One transcript line. Points, predictions and truths are rendered as
/// text so every learner shares the same columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub trial: usize,
    pub round: usize,
    pub point: String,
    pub decision: String,
    pub truth: String,
    pub outcome: Outcome,
}

/// Text form of a point or a value in the CSV.
pub(crate) trait Cell {
    fn cell(&self) -> String;
}

impl Cell for usize {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for () {
    fn cell(&self) -> String {
        String::new()
    }
}

impl Cell for Label {
    fn cell(&self) -> String {
        self.to_string()
    }
}

impl Cell for f64 {
    fn cell(&self) -> String {
        format!("{self:?}")
    }
}

impl Cell for Vec<f64> {
    fn cell(&self) -> String {
        Point::from(self.as_slice()).to_string()
    }
}

impl<T: Cell> Cell for Decision<T> {
    fn cell(&self) -> String {
        match self {
            Decision::Predict(v) => v.cell(),
            Decision::Abstain => "abstain".into(),
        }
    }
}

pub fn trial_csv_name(trial: usize) -> String {
    format!("trial_{trial:04}.csv")
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Writes one CSV per trial and `summary.json` into `dir`, returning the
/// paths written.
pub fn write_run(dir: &Path, trials: &[Vec<CsvRow>], summary: &impl Serialize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, rows) in trials.iter().enumerate() {
        let path = dir.join(trial_csv_name(i));
        write_csv(&path, rows)?;
        written.push(path);
    }
    let path = dir.join("summary.json");
    write_json(&path, summary)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            CsvRow {
                trial: 0,
                round: 0,
                point: vec![0.1, -2.0].cell(),
                decision: Decision::<Label>::Abstain.cell(),
                truth: Label::Neg.cell(),
                outcome: Outcome::Abstain,
            },
            CsvRow {
                trial: 0,
                round: 1,
                point: ().cell(),
                decision: Decision::Predict(vec![0.25, 0.75]).cell(),
                truth: vec![0.3, 0.7].cell(),
                outcome: Outcome::Correct,
            },
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("trial,round,point,decision,truth,outcome\n"));
        assert_eq!(read_csv(&path).unwrap(), rows);
        assert_eq!(rows[0].point.parse::<Point>().unwrap(), Point::Vector(vec![0.1, -2.0]));
    }

    #[test]
    fn empty_trial_keeps_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_csv(&path, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), CSV_HEADER.join(",") + "\n");
        assert!(read_csv(&path).unwrap().is_empty());
    }
}
