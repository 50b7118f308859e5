//! CSV, JSON and plot-data writers for one output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rcbm_sim::fmt17;
use rcbm_sim::validate::{summarize, ExperimentReport, Summary};
use serde::Serialize;

use crate::config::RunConfig;

/// Files written so far, relative to the output directory.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

/// A CSV cell: numbers at 17 significant digits, text as is.
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `;`-separated numbers inside one CSV field.
pub fn join17(xs: &[f64]) -> Cell {
    Cell::Text(xs.iter().map(|&x| fmt17(x)).collect::<Vec<_>>().join(";"))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", path.display())
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, String> {
        fs::create_dir_all(root).map_err(|e| io_err(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    fn open(&mut self, name: &str) -> Result<(PathBuf, BufWriter<File>), String> {
        let path = self.root.join(name);
        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
        self.written.push(name.to_string());
        Ok((path, BufWriter::new(f)))
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<Cell>>) -> Result<(), String> {
        let (path, f) = self.open(name)?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(header).map_err(|e| io_err(&path, e))?;
        for row in rows {
            if row.len() != header.len() {
                return Err(io_err(
                    &path,
                    format!("row has {} fields, header {}", row.len(), header.len()),
                ));
            }
            w.write_record(row.iter().map(Cell::render))
                .map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))
    }

    /// Gnu-style plot data: `#` comment lines, whitespace-separated columns,
    /// blocks separated by two blank lines.
    pub fn plot(
        &mut self,
        name: &str,
        comment: &str,
        blocks: &[(String, Vec<Vec<f64>>)],
    ) -> Result<(), String> {
        let (path, mut f) = self.open(name)?;
        let mut body = String::new();
        for line in comment.lines() {
            body.push_str(&format!("# {line}\n"));
        }
        for (i, (title, rows)) in blocks.iter().enumerate() {
            if i > 0 {
                body.push_str("\n\n");
            }
            if !title.is_empty() {
                body.push_str(&format!("# {title}\n"));
            }
            for row in rows {
                let cols: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
                body.push_str(&cols.join(" "));
                body.push('\n');
            }
        }
        f.write_all(body.as_bytes()).map_err(|e| io_err(&path, e))?;
        f.flush().map_err(|e| io_err(&path, e))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), String> {
        let (path, mut f) = self.open(name)?;
        serde_json::to_writer_pretty(&mut f, value).map_err(|e| io_err(&path, e))?;
        writeln!(f).map_err(|e| io_err(&path, e))?;
        f.flush().map_err(|e| io_err(&path, e))
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), String> {
        let (path, mut f) = self.open(name)?;
        f.write_all(body.as_bytes()).map_err(|e| io_err(&path, e))?;
        f.flush().map_err(|e| io_err(&path, e))
    }
}

/// Summary of one run, written as `summary.json`.
#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub subcommand: &'a str,
    pub seed: u64,
    pub summary: Summary,
    pub pass: bool,
    pub reports: &'a [ExperimentReport],
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

/// Writes the report table, `summary.json`, the effective config and the
/// manifest. Returns whether every report passed or was skipped.
pub fn finish(
    out: &mut OutDir,
    subcommand: &str,
    cfg: &RunConfig,
    threads: usize,
    reports: &[ExperimentReport],
    extra: serde_json::Value,
) -> Result<bool, String> {
    if !reports.is_empty() {
        write_reports(out, reports)?;
    }
    let summary = summarize(reports);
    let pass = summary.failed == 0;
    out.json(
        "summary.json",
        &RunSummary {
            subcommand,
            seed: cfg.seed,
            summary,
            pass,
            reports,
            extra,
        },
    )?;
    let toml_text = cfg.to_toml()?;
    out.text("config.toml", &toml_text)?;
    let mut outputs = out.written().to_vec();
    outputs.push("manifest.json".into());
    let manifest = serde_json::json!({
        "tool": "rcbm",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": cfg.seed,
        "threads": threads,
        "config": cfg,
        "config_toml": toml_text,
        "outputs": outputs,
    });
    out.json("manifest.json", &manifest)?;
    Ok(pass)
}

fn write_reports(out: &mut OutDir, reports: &[ExperimentReport]) -> Result<(), String> {
    let header = [
        "name",
        "statistic",
        "pass",
        "analytic",
        "mc_estimate",
        "stderr",
        "z_score",
        "threshold",
        "runtime_seconds",
        "parameters",
        "note",
    ];
    let rows = reports
        .iter()
        .map(|r| {
            let stat = serde_json::to_value(r.statistic)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            let params: Vec<String> = r
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt17(*v)))
                .collect();
            vec![
                r.name.as_str().into(),
                stat.into(),
                (if r.pass { "true" } else { "false" }).into(),
                r.analytic_value.into(),
                r.mc_estimate.into(),
                r.stderr.into(),
                r.z_score.into(),
                r.threshold.into(),
                r.runtime_seconds.into(),
                params.join(";").into(),
                r.note.as_str().into(),
            ]
        })
        .collect();
    out.csv("reports.csv", &header, rows)
}
