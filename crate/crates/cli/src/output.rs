//! Result-file writers: CSV tables (RFC-4180) and JSON reports, each with
//! the embedded run record header.

use crate::record::{now_iso, RunRecord};
use std::path::Path;

/// A CSV result table built in memory and written with its header.
pub struct CsvOutput {
    record: RunRecord,
    started: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvOutput {
    pub fn new(record: RunRecord, columns: &[&str]) -> Self {
        CsvOutput {
            record,
            started: now_iso(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row arity mismatch");
        self.rows.push(row);
    }

    /// Renders header + table. Deterministic except the timestamp lines.
    pub fn render(&self) -> anyhow::Result<String> {
        let mut table = csv::WriterBuilder::new().from_writer(Vec::new());
        table.write_record(&self.columns)?;
        for row in &self.rows {
            table.write_record(row)?;
        }
        let table = String::from_utf8(table.into_inner()?)?;
        Ok(self.record.header_lines(&self.started, &now_iso()) + &table)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.render()?)?;
        Ok(())
    }
}

/// JSON report with the run record and timestamps embedded.
pub fn render_json_report(
    record: &RunRecord,
    started: &str,
    results: serde_json::Value,
) -> anyhow::Result<String> {
    let doc = serde_json::json!({
        "magic": "perclab-result-v1",
        "run": record,
        "started": started,
        "finished": now_iso(),
        "results": results,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Timestamp-insensitive comparison key for JSON reports.
pub fn json_comparison_key(text: &str) -> anyhow::Result<String> {
    let mut doc: serde_json::Value = serde_json::from_str(text)?;
    if let Some(obj) = doc.as_object_mut() {
        obj.remove("started");
        obj.remove("finished");
    }
    Ok(serde_json::to_string(&doc)?)
}

/// Reads a named f64 column out of a perclab CSV result file.
pub fn read_csv_columns(
    text: &str,
    wanted: &[&str],
) -> anyhow::Result<Vec<Vec<f64>>> {
    let table: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let mut reader = csv::ReaderBuilder::new().from_reader(table.as_bytes());
    let headers = reader.headers()?.clone();
    let mut indices = Vec::new();
    for name in wanted {
        let idx = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| anyhow::anyhow!("column '{name}' not found"))?;
        indices.push(idx);
    }
    let mut out = vec![Vec::new(); wanted.len()];
    for row in reader.records() {
        let row = row?;
        for (slot, &idx) in out.iter_mut().zip(&indices) {
            slot.push(row[idx].parse::<f64>()?);
        }
    }
    Ok(out)
}

/// Formats a float with full round-trip precision, deterministically.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_with_header() {
        let rec = RunRecord::new("estimate", serde_json::json!({"a": 1}), 5);
        let mut out = CsvOutput::new(rec, &["schema", "x", "y"]);
        out.push_row(vec!["v1".into(), "1.5".into(), "2.25".into()]);
        out.push_row(vec!["v1".into(), "0.125".into(), "7".into()]);
        let text = out.render().unwrap();
        assert!(text.starts_with("# perclab-result v1\n"));
        let cols = read_csv_columns(&text, &["x", "y"]).unwrap();
        assert_eq!(cols[0], vec![1.5, 0.125]);
        assert_eq!(cols[1], vec![2.25, 7.0]);
        let rec2 = RunRecord::from_file_text(&text).unwrap();
        assert_eq!(rec2.cmd, "estimate");
    }

    #[test]
    fn rfc4180_quoting_applies() {
        let rec = RunRecord::new("estimate", serde_json::json!({}), 5);
        let mut out = CsvOutput::new(rec, &["schema", "geometry"]);
        out.push_row(vec!["v1".into(), "box[0,3]x[0,5], padded".into()]);
        let text = out.render().unwrap();
        assert!(text.contains("\"box[0,3]x[0,5], padded\""));
    }

    #[test]
    fn json_key_ignores_timestamps() {
        let rec = RunRecord::new("wulff", serde_json::json!({}), 5);
        let a = render_json_report(&rec, "t0", serde_json::json!({"v": 1})).unwrap();
        std::thread::sleep(std::time::Duration::from_millis(5));
        let b = render_json_report(&rec, "t9", serde_json::json!({"v": 1})).unwrap();
        assert_eq!(
            json_comparison_key(&a).unwrap(),
            json_comparison_key(&b).unwrap()
        );
    }
}
