//! Report emission: CSV (RFC 4180 via the `csv` writer), JSON mirroring the
//! step reports, and a two-column plot file. Identical reports produce
//! byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

use super::run::StepReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    PlotData,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "plotdata" => Ok(Self::PlotData),
            other => Err(Error::Config(format!(
                "unknown report format {other:?}; expected csv, json, or plotdata"
            ))),
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            Self::Csv => "reports.csv",
            Self::Json => "reports.json",
            Self::PlotData => "reports.plot",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write the selected formats into `dir`; returns the created paths.
pub fn emit_report(
    reports: &[StepReport],
    formats: &[ReportFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter(
            "nothing to emit: empty report list".into(),
        ));
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::with_capacity(formats.len());
    for &format in formats {
        let path = dir.join(format.file_name());
        let bytes = render(reports, format)?;
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Render one format to bytes.
pub fn render(reports: &[StepReport], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => render_csv(reports),
        ReportFormat::Json => {
            let mut v =
                serde_json::to_vec_pretty(reports).map_err(|e| Error::Serde(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        ReportFormat::PlotData => {
            // Two columns: refinement index and the certified continuous
            // cost (Monte Carlo when no closed form exists).
            let mut out = Vec::new();
            for r in reports {
                let y = r.report.exact_cost.unwrap_or(r.report.mc_cost);
                writeln!(out, "{} {}", r.step, y).expect("vec write");
            }
            Ok(out)
        }
    }
}

fn render_csv(reports: &[StepReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Serde(e.to_string());
    w.write_record([
        "step",
        "radius",
        "n",
        "m",
        "k",
        "finite_cost",
        "exact_cost",
        "mc_cost",
        "mc_ci",
        "oracle_gap",
        "sweeps",
        "wall_ms",
    ])
    .map_err(wrap)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in reports {
        w.write_record([
            r.step.to_string(),
            r.radius.to_string(),
            r.levels.to_string(),
            r.action_half_width.to_string(),
            r.action_points.to_string(),
            r.report.finite_cost.to_string(),
            opt(r.report.exact_cost),
            r.report.mc_cost.to_string(),
            r.report.mc_half_ci95.to_string(),
            opt(r.report.gap),
            r.sweeps.to_string(),
            r.wall_ms.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.into_inner().map_err(|e| Error::Serde(e.to_string()))
}

/// Parse a JSON report file back into step reports.
pub fn load_reports(path: &Path) -> Result<Vec<StepReport>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::CostReport;
    use crate::finite::{SavedAgentPolicy, SavedPolicy};

    fn sample_reports() -> Vec<StepReport> {
        vec![StepReport {
            step: 0,
            radius: 1.0,
            levels: 4,
            action_half_width: 1.0,
            action_points: 3,
            report: CostReport {
                finite_cost: 0.5,
                exact_cost: Some(0.55),
                mc_cost: 0.551,
                mc_half_ci95: 0.002,
                gap: Some(0.13),
            },
            sweeps: 6,
            wall_ms: 0,
            policy: SavedPolicy {
                agents: vec![SavedAgentPolicy {
                    radius: 1.0,
                    levels: 4,
                    half_width: 1.0,
                    points: 3,
                    nested: true,
                    actions: vec![0.0, -1.0, 0.0, 0.0, 1.0],
                }],
            },
        }]
    }

    #[test]
    fn csv_has_header_plus_one_row_per_report() {
        let bytes = render(&sample_reports(), ReportFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("step,radius,n,m,k,finite_cost"));
        assert!(lines[1].starts_with("0,1,4,1,3,0.5,0.55,"));
    }

    #[test]
    fn json_roundtrip_is_field_exact() {
        let reports = sample_reports();
        let bytes = render(&reports, ReportFormat::Json).unwrap();
        let back: Vec<StepReport> = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn plotdata_rows_match_schedule_length() {
        let mut reports = sample_reports();
        reports.push(reports[0].clone());
        reports[1].step = 1;
        let bytes = render(&reports, ReportFormat::PlotData).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), "0 0.55");
    }

    #[test]
    fn empty_reports_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_report(&[], &[ReportFormat::Csv], dir.path()).is_err());
    }

    #[test]
    fn files_are_written_and_stable() {
        let dir = tempfile::tempdir().unwrap();
        let reports = sample_reports();
        let formats = [ReportFormat::Csv, ReportFormat::Json, ReportFormat::PlotData];
        let paths = emit_report(&reports, &formats, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let first: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
        emit_report(&reports, &formats, dir.path()).unwrap();
        let second: Vec<Vec<u8>> = paths.iter().map(|p| fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        let loaded = load_reports(&paths[1]).unwrap();
        assert_eq!(loaded, reports);
    }
}
