//! Rendering, artifacts and the exit-code mapping.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use quadvar::report::round12;
use quadvar::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

/// Result of one subcommand. Machine output is `report` (JSON) and `csv`; the human text
/// only restates values that appear there.
pub struct Outcome {
    pub default_format: Format,
    pub human: String,
    pub report: Value,
    pub csv: Option<String>,
    /// Named gates; any failure gives exit code 2.
    pub checks: Vec<(String, bool)>,
    pub seed: Option<u64>,
    /// Resolved parameters, recorded in the manifest.
    pub config: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Human => Ok(self.human.clone()),
            Format::Json => Ok(self.json_text()),
            Format::Csv => self.csv.clone().ok_or_else(|| "this command has no CSV output; use --format json".into()),
        }
    }

    /// `report.json`, `report.csv` (when available) and `manifest.json` in `dir`.
    pub fn write_artifacts(
        &self,
        dir: &Path,
        subcommand: &str,
        args: &[String],
        threads: Option<usize>,
        seconds: f64,
    ) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        let mut artifacts = vec!["report.json".to_string()];
        fs::write(dir.join("report.json"), self.json_text())?;
        if let Some(csv) = &self.csv {
            fs::write(dir.join("report.csv"), csv)?;
            artifacts.push("report.csv".into());
        }
        let checks: Vec<Value> = self.checks.iter().map(|(name, ok)| json!({ "check": name, "passed": ok })).collect();
        let manifest = json!({
            "subcommand": subcommand,
            "arguments": args,
            "config": self.config,
            "seed": self.seed,
            "threads": threads,
            "artifacts": artifacts,
            "wall_clock_seconds": seconds,
            "checks": checks,
            "passed": self.passed(),
            "version": env!("CARGO_PKG_VERSION"),
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("JSON values always serialize");
        text.push('\n');
        fs::write(dir.join("manifest.json"), text)
    }
}

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::DataRejected { .. } | Error::Malformed { .. } => 3,
        Error::Config(_) => 4,
        Error::ImaginaryResidual { .. }
        | Error::Quadrature(_)
        | Error::UncertifiableTail { .. }
        | Error::LengthMismatch { .. }
        | Error::Uncalibrated => 2,
        _ => 1,
    }
}

/// Fixed six-decimal rendering without a negative zero.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Twelve significant digits for text tables.
pub fn sig12(x: f64) -> String {
    format!("{:.11e}", round12(x))
}

/// Left-aligned text table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_table() {
        assert_eq!(fixed6(-1e-12), "0.000000");
        assert_eq!(fixed6(-1.0), "-1.000000");
        let t = table(&["a", "value"], &[vec!["10".into(), "x".into()]]);
        assert_eq!(t, "a   value\n10  x\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code_for(&Error::ZeroModulus), 1);
        assert_eq!(exit_code_for(&Error::UnsupportedWeight(24)), 1);
        assert_eq!(exit_code_for(&Error::MissingWeights(vec![24])), 1);
        assert_eq!(exit_code_for(&Error::DataRejected { n: 4, reason: String::new() }), 3);
        assert_eq!(exit_code_for(&Error::Config(String::new())), 4);
        assert_eq!(exit_code_for(&Error::Quadrature(String::new())), 2);
    }
}
