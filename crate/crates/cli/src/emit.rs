//! Report serialization. Output is byte-deterministic for a fixed report:
//! fixed field order, fixed float formatting, LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::report::{format_value, SuiteReport};

pub const CHECKS_HEADER: &str = "suite,name,status,value,threshold,comparison,kind,note";
pub const SPECTRUM_HEADER: &str = "l,m,w,eigenvalue";
pub const ZETA_HEADER: &str = "s,zeta,s_zeta,tail_bound";

/// Quotes a CSV field when needed.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_json(report: &SuiteReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is serializable");
    s.push('\n');
    s
}

pub fn checks_csv(report: &SuiteReport) -> String {
    let mut out = format!("{CHECKS_HEADER}\n");
    for c in &report.checks {
        let threshold = if c.threshold.is_nan() { String::new() } else { format_value(c.threshold) };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.suite.name(),
            field(&c.name),
            c.status.as_str(),
            format_value(c.value),
            threshold,
            c.comparison.as_str(),
            c.kind.as_str(),
            field(&c.note)
        )
        .unwrap();
    }
    out
}

pub fn spectrum_csv(report: &SuiteReport) -> String {
    let mut out = format!("{SPECTRUM_HEADER}\n");
    for r in &report.spectrum {
        writeln!(out, "{},{},{},{}", r.l, r.m, r.w, r.eigenvalue).unwrap();
    }
    out
}

pub fn zeta_csv(report: &SuiteReport) -> String {
    report.zeta.as_ref().map_or_else(|| format!("{ZETA_HEADER}\n"), |z| z.to_csv())
}

/// Writes the report into `dir` and returns the files written. JSON goes to
/// `report.json`; CSV to `checks.csv`, `spectrum.csv` and `zeta.csv`, each
/// with a header row even when empty.
pub fn emit(report: &SuiteReport, format: Format, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files: Vec<(&str, String)> = match format {
        Format::Json => vec![("report.json", to_json(report))],
        Format::Csv => vec![
            ("checks.csv", checks_csv(report)),
            ("spectrum.csv", spectrum_csv(report)),
            ("zeta.csv", zeta_csv(report)),
        ],
    };
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
