//! CSV and JSON output of run reports.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::RunReport;

#[derive(Serialize)]
struct Row<'a> {
    instance: &'a str,
    config_hash: &'a str,
    seed: u64,
    parts: usize,
    solved: usize,
    weight: String,
    coverage_pct: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    search_time_s: Option<String>,
    lower: String,
    upper: String,
    bounds_ok: String,
}

/// One row per report. Without `timing` the search-time column is left out,
/// which makes the output reproducible byte for byte.
pub fn write_csv<W: std::io::Write>(out: W, reports: &[RunReport], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if reports.is_empty() {
        let mut header = vec![
            "instance",
            "config_hash",
            "seed",
            "parts",
            "solved",
            "weight",
            "coverage_pct",
        ];
        if timing {
            header.push("search_time_s");
        }
        header.extend(["lower", "upper", "bounds_ok"]);
        w.write_record(&header)?;
    }
    for r in reports {
        let b = r.bounds.as_ref();
        w.serialize(Row {
            instance: &r.instance,
            config_hash: &r.config_hash,
            seed: r.seed,
            parts: r.parts.len(),
            solved: r
                .parts
                .iter()
                .filter(|p| p.status == crate::pipeline::PartStatus::Solved)
                .count(),
            weight: format!("{}", r.weight),
            coverage_pct: format!("{:.2}", 100.0 * r.coverage),
            search_time_s: timing.then(|| format!("{:.6}", r.search_time)),
            lower: b
                .and_then(|b| b.lower)
                .map(|l| l.to_string())
                .unwrap_or_default(),
            upper: b.map(|b| b.upper.to_string()).unwrap_or_default(),
            bounds_ok: b.map(|b| b.consistent.to_string()).unwrap_or_default(),
        })?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn csv_string(reports: &[RunReport], timing: bool) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, reports, timing)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Writes `<stem>.csv` (with timing) and `<stem>.json` (full reports).
pub fn emit_results(reports: &[RunReport], stem: &Path) -> Result<()> {
    let csv_path = stem.with_extension("csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_csv(file, reports, true)?;
    let json_path = stem.with_extension("json");
    let json = serde_json::to_string_pretty(reports)?;
    std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))
}
