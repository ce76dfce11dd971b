//! Result records and their CSV / JSON-lines encodings.
//!
//! CSV files start with `# key = value` comment lines (metadata, then the
//! config echo under a `config.` prefix), followed by one table. Each table
//! row is either a `record` or an `aggregate`; columns that do not apply to
//! the row kind are empty. JSON-lines files carry the same content as one
//! `meta` object followed by `record` and `aggregate` objects.
//!
//! Floats are written in their shortest round-trip form, so parsing a file
//! and emitting it again reproduces it byte for byte.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Error => "error",
        }
    }
}

/// One (method, N, r, distribution seed, repetition) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub institutions: usize,
    pub anchor_rows: usize,
    pub distribution_seed: u64,
    pub repetition: usize,
    pub status: Status,
    pub accuracy: Option<f64>,
    /// Collaborative-function estimation: matrix construction.
    pub build_ms: Option<f64>,
    /// Collaborative-function estimation: eigen/singular solve and back-transform.
    pub solve_ms: Option<f64>,
    pub total_ms: Option<f64>,
    /// m~ of every institution, in institution order.
    pub reduced_dims: Vec<usize>,
    pub collab_dim: Option<usize>,
    /// Shift the generalized eigensolver actually applied to B.
    pub gep_ridge: Option<f64>,
    pub message: String,
}

impl RunRecord {
    pub fn new(method: &str, institutions: usize, anchor_rows: usize, distribution_seed: u64, repetition: usize) -> Self {
        Self {
            method: method.to_string(),
            institutions,
            anchor_rows,
            distribution_seed,
            repetition,
            status: Status::Ok,
            accuracy: None,
            build_ms: None,
            solve_ms: None,
            total_ms: None,
            reduced_dims: Vec::new(),
            collab_dim: None,
            gep_ridge: None,
            message: String::new(),
        }
    }

    pub fn fail(&mut self, message: impl fmt::Display) {
        self.status = Status::Error;
        self.accuracy = None;
        self.message = message.to_string();
    }
}

/// Mean and spread of the successful runs of one (method, N, r) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: String,
    pub institutions: usize,
    pub anchor_rows: usize,
    pub runs: usize,
    pub ok: usize,
    pub accuracy_mean: Option<f64>,
    /// Sample standard deviation (0 for a single run).
    pub accuracy_std: Option<f64>,
    pub build_ms_mean: Option<f64>,
    pub solve_ms_mean: Option<f64>,
    pub total_ms_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// `schema_version`, `generator`, `mode`, and friends.
    pub metadata: Vec<(String, String)>,
    /// The config as `key = value` pairs with TOML-formatted values.
    pub config: Vec<(String, String)>,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn sample_std(xs: &[f64]) -> Option<f64> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Groups records by (method, N, r) in order of first appearance.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(&str, usize, usize)> = Vec::new();
    for r in records {
        let key = (r.method.as_str(), r.institutions, r.anchor_rows);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(method, institutions, anchor_rows)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.method == method && r.institutions == institutions && r.anchor_rows == anchor_rows)
                .collect();
            let ok: Vec<&RunRecord> = group.iter().copied().filter(|r| r.status == Status::Ok).collect();
            let collect = |f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> { ok.iter().filter_map(|r| f(r)).collect() };
            let acc = collect(|r| r.accuracy);
            Aggregate {
                method: method.to_string(),
                institutions,
                anchor_rows,
                runs: group.len(),
                ok: ok.len(),
                accuracy_mean: mean(&acc),
                accuracy_std: sample_std(&acc),
                build_ms_mean: mean(&collect(|r| r.build_ms)),
                solve_ms_mean: mean(&collect(|r| r.solve_ms)),
                total_ms_mean: mean(&collect(|r| r.total_ms)),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(HarnessError::Config(format!("unknown format '{other}'"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 22] = [
    "kind",
    "method",
    "institutions",
    "anchor_rows",
    "distribution_seed",
    "repetition",
    "status",
    "accuracy",
    "build_ms",
    "solve_ms",
    "total_ms",
    "reduced_dims",
    "collab_dim",
    "gep_ridge",
    "runs",
    "ok",
    "accuracy_mean",
    "accuracy_std",
    "build_ms_mean",
    "solve_ms_mean",
    "total_ms_mean",
    "message",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn record_row(r: &RunRecord) -> Vec<String> {
    let dims: Vec<String> = r.reduced_dims.iter().map(|d| d.to_string()).collect();
    vec![
        "record".into(),
        r.method.clone(),
        r.institutions.to_string(),
        r.anchor_rows.to_string(),
        r.distribution_seed.to_string(),
        r.repetition.to_string(),
        r.status.as_str().into(),
        opt(r.accuracy),
        opt(r.build_ms),
        opt(r.solve_ms),
        opt(r.total_ms),
        dims.join(";"),
        opt(r.collab_dim),
        opt(r.gep_ridge),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        r.message.clone(),
    ]
}

fn aggregate_row(a: &Aggregate) -> Vec<String> {
    let mut row = vec![String::new(); CSV_COLUMNS.len()];
    row[0] = "aggregate".into();
    row[1] = a.method.clone();
    row[2] = a.institutions.to_string();
    row[3] = a.anchor_rows.to_string();
    row[14] = a.runs.to_string();
    row[15] = a.ok.to_string();
    row[16] = opt(a.accuracy_mean);
    row[17] = opt(a.accuracy_std);
    row[18] = opt(a.build_ms_mean);
    row[19] = opt(a.solve_ms_mean);
    row[20] = opt(a.total_ms_mean);
    row
}

fn render_csv(result: &ExperimentResult) -> Result<String> {
    let mut out = String::new();
    for (k, v) in &result.metadata {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    for (k, v) in &result.config {
        out.push_str(&format!("# config.{k} = {v}\n"));
    }
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let err = |e: csv::Error| HarnessError::Data(e.to_string());
    wtr.write_record(CSV_COLUMNS).map_err(err)?;
    for r in &result.records {
        wtr.write_record(record_row(r)).map_err(err)?;
    }
    for a in &result.aggregates {
        wtr.write_record(aggregate_row(a)).map_err(err)?;
    }
    let bytes = wtr.into_inner().map_err(|e| HarnessError::Data(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Meta {
        metadata: Vec<(String, String)>,
        config: Vec<(String, String)>,
    },
    Record(RunRecord),
    Aggregate(Aggregate),
}

fn render_jsonl(result: &ExperimentResult) -> Result<String> {
    let mut out = String::new();
    let mut push = |line: &Line| -> Result<()> {
        out.push_str(&serde_json::to_string(line).map_err(|e| HarnessError::Data(e.to_string()))?);
        out.push('\n');
        Ok(())
    };
    push(&Line::Meta {
        metadata: result.metadata.clone(),
        config: result.config.clone(),
    })?;
    for r in &result.records {
        push(&Line::Record(r.clone()))?;
    }
    for a in &result.aggregates {
        push(&Line::Aggregate(a.clone()))?;
    }
    Ok(out)
}

pub fn render_results(result: &ExperimentResult, format: Format) -> Result<String> {
    match format {
        Format::Csv => render_csv(result),
        Format::Jsonl => render_jsonl(result),
    }
}

pub fn emit_results(result: &ExperimentResult, format: Format, path: &Path) -> Result<()> {
    let text = render_results(result, format)?;
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

fn parse_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse(msg.into())
}

fn field<T: FromStr>(row: &csv::StringRecord, i: usize) -> Result<T> {
    row[i]
        .parse()
        .map_err(|_| parse_err(format!("column {}: bad value '{}'", CSV_COLUMNS[i], &row[i])))
}

fn opt_field<T: FromStr>(row: &csv::StringRecord, i: usize) -> Result<Option<T>> {
    if row[i].is_empty() {
        Ok(None)
    } else {
        field(row, i).map(Some)
    }
}

fn parse_csv(text: &str) -> Result<ExperimentResult> {
    let mut metadata = Vec::new();
    let mut config = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix("# ") else { break };
        body_start += line.len();
        let (k, v) = rest
            .trim_end_matches('\n')
            .split_once(" = ")
            .ok_or_else(|| parse_err(format!("malformed metadata line '{}'", line.trim_end())))?;
        match k.strip_prefix("config.") {
            Some(key) => config.push((key.to_string(), v.to_string())),
            None => metadata.push((k.to_string(), v.to_string())),
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text[body_start..].as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(e.to_string()))?;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(parse_err("unexpected column layout"));
    }
    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        match &row[0] {
            "record" => records.push(RunRecord {
                method: row[1].to_string(),
                institutions: field(&row, 2)?,
                anchor_rows: field(&row, 3)?,
                distribution_seed: field(&row, 4)?,
                repetition: field(&row, 5)?,
                status: match &row[6] {
                    "ok" => Status::Ok,
                    "error" => Status::Error,
                    other => return Err(parse_err(format!("bad status '{other}'"))),
                },
                accuracy: opt_field(&row, 7)?,
                build_ms: opt_field(&row, 8)?,
                solve_ms: opt_field(&row, 9)?,
                total_ms: opt_field(&row, 10)?,
                reduced_dims: if row[11].is_empty() {
                    Vec::new()
                } else {
                    row[11]
                        .split(';')
                        .map(|d| d.parse().map_err(|_| parse_err(format!("bad reduced_dims '{}'", &row[11]))))
                        .collect::<Result<_>>()?
                },
                collab_dim: opt_field(&row, 12)?,
                gep_ridge: opt_field(&row, 13)?,
                message: row[21].to_string(),
            }),
            "aggregate" => aggregates.push(Aggregate {
                method: row[1].to_string(),
                institutions: field(&row, 2)?,
                anchor_rows: field(&row, 3)?,
                runs: field(&row, 14)?,
                ok: field(&row, 15)?,
                accuracy_mean: opt_field(&row, 16)?,
                accuracy_std: opt_field(&row, 17)?,
                build_ms_mean: opt_field(&row, 18)?,
                solve_ms_mean: opt_field(&row, 19)?,
                total_ms_mean: opt_field(&row, 20)?,
            }),
            other => return Err(parse_err(format!("unknown row kind '{other}'"))),
        }
    }
    Ok(ExperimentResult {
        metadata,
        config,
        records,
        aggregates,
    })
}

fn parse_jsonl(text: &str) -> Result<ExperimentResult> {
    let mut lines = text.lines().enumerate();
    let (metadata, config) = match lines.next() {
        Some((_, first)) => match serde_json::from_str(first).map_err(|e| parse_err(format!("line 1: {e}")))? {
            Line::Meta { metadata, config } => (metadata, config),
            _ => return Err(parse_err("line 1: expected the meta object")),
        },
        None => return Err(parse_err("empty file")),
    };
    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for (k, line) in lines {
        match serde_json::from_str(line).map_err(|e| parse_err(format!("line {}: {e}", k + 1)))? {
            Line::Record(r) => records.push(r),
            Line::Aggregate(a) => aggregates.push(a),
            Line::Meta { .. } => return Err(parse_err(format!("line {}: repeated meta object", k + 1))),
        }
    }
    Ok(ExperimentResult {
        metadata,
        config,
        records,
        aggregates,
    })
}

pub fn parse_results(text: &str, format: Format) -> Result<ExperimentResult> {
    match format {
        Format::Csv => parse_csv(text),
        Format::Jsonl => parse_jsonl(text),
    }
}
