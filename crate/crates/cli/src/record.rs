//! Result records and their CSV / JSON forms.
//!
//! CSV files start with a `#` preamble (tool version and the resolved
//! configuration), then a header with unit-annotated columns. Numbers are
//! written with 17 significant digits so they re-parse bit for bit.

use std::io::Write;
use std::path::Path;

use casimir_core::Kind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityKind {
    Energy,
    Force,
    Gradient,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 3] = [QuantityKind::Energy, QuantityKind::Force, QuantityKind::Gradient];

    fn prefix(self) -> &'static str {
        match self {
            QuantityKind::Energy => "E",
            QuantityKind::Force => "F",
            QuantityKind::Gradient => "G",
        }
    }

    fn unit(self) -> &'static str {
        match self {
            QuantityKind::Energy => "J",
            QuantityKind::Force => "N",
            QuantityKind::Gradient => "N_per_m",
        }
    }
}

impl From<Kind> for QuantityKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Energy => QuantityKind::Energy,
            Kind::Force => QuantityKind::Force,
            Kind::Gradient => QuantityKind::Gradient,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityValues {
    pub kind: QuantityKind,
    pub leading: Option<f64>,
    pub ntlo: Option<f64>,
    pub sum: Option<f64>,
    /// Relative to the perfect-conductor PFA value at the same d and R.
    pub normalized_leading: Option<f64>,
    pub normalized_sum: Option<f64>,
    pub theta: Option<f64>,
}

impl QuantityValues {
    pub fn empty(kind: QuantityKind) -> Self {
        Self {
            kind,
            leading: None,
            ntlo: None,
            sum: None,
            normalized_leading: None,
            normalized_sum: None,
            theta: None,
        }
    }

    fn columns(&self) -> [(String, Option<f64>); 6] {
        let (p, u) = (self.kind.prefix(), self.kind.unit());
        [
            (format!("{p}_leading_{u}"), self.leading),
            (format!("{p}_ntlo_{u}"), self.ntlo),
            (format!("{p}_sum_{u}"), self.sum),
            (format!("{p}_normalized_leading"), self.normalized_leading),
            (format!("{p}_normalized_sum"), self.normalized_sum),
            (format!("theta1_{p}"), self.theta),
        ]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordDiagnostics {
    pub s_terms: usize,
    pub phi_nodes: usize,
    pub t_nodes: usize,
    pub refinements: usize,
    pub error_estimate: f64,
    pub l_max: usize,
    pub xi_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    /// m.
    pub d: f64,
    pub e: f64,
    pub method: String,
    pub sphere: String,
    pub plate: String,
    pub values: Vec<QuantityValues>,
    pub diagnostics: RecordDiagnostics,
    /// "ok", or "error: <message>" for a point that failed.
    pub status: String,
}

impl ResultRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    /// Named numeric result columns (diagnostics excluded).
    pub fn value_columns(&self) -> Vec<(String, Option<f64>)> {
        self.values.iter().flat_map(|v| v.columns()).collect()
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        self.value_columns().into_iter().find(|(n, _)| n == column).and_then(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    /// Resolved configuration as TOML.
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub metadata: Metadata,
    pub records: Vec<ResultRecord>,
}

const DIAG_COLUMNS: [&str; 7] = ["s_terms", "phi_nodes", "t_nodes", "refinements", "error_estimate", "l_max", "xi_nodes"];

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn cell(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn write_csv<W: Write>(doc: &Document, mut out: W) -> CliResult<()> {
    writeln!(out, "# casimir {}", doc.metadata.version)?;
    for line in doc.metadata.config.lines() {
        writeln!(out, "# {line}")?;
    }
    let kinds: Vec<QuantityKind> = doc
        .records
        .first()
        .map(|r| r.values.iter().map(|v| v.kind).collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["d_m", "e", "method", "sphere", "plate"].map(String::from).to_vec();
    for k in &kinds {
        header.extend(QuantityValues::empty(*k).columns().into_iter().map(|(n, _)| n));
    }
    header.extend(DIAG_COLUMNS.map(String::from));
    header.push("status".into());
    w.write_record(&header)?;
    for r in &doc.records {
        if r.values.iter().map(|v| v.kind).ne(kinds.iter().copied()) {
            return Err(CliError::Data("records carry different quantities".into()));
        }
        let mut row = vec![format_number(r.d), format_number(r.e), r.method.clone(), r.sphere.clone(), r.plate.clone()];
        row.extend(r.value_columns().into_iter().map(|(_, v)| cell(v)));
        let dg = &r.diagnostics;
        row.extend([
            dg.s_terms.to_string(),
            dg.phi_nodes.to_string(),
            dg.t_nodes.to_string(),
            dg.refinements.to_string(),
            format_number(dg.error_estimate),
            dg.l_max.to_string(),
            dg.xi_nodes.to_string(),
        ]);
        row.push(r.status.clone());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(doc: &Document, mut out: W) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, doc).map_err(|e| match e.io_error_kind() {
        Some(k) => std::io::Error::from(k).into(),
        None => CliError::Io(e.to_string()),
    })?;
    writeln!(out)?;
    Ok(())
}

fn parse_f64(col: &str, raw: &str, line: u64) -> CliResult<Option<f64>> {
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse()
        .map(Some)
        .map_err(|_| CliError::Data(format!("line {line}, column {col}: not a number: '{raw}'")))
}

pub fn read_csv(text: &str) -> CliResult<Document> {
    let mut version = String::new();
    let mut config = Vec::new();
    for line in text.lines().take_while(|l| l.starts_with('#')) {
        let body = line.strip_prefix("# ").unwrap_or(&line[1..]);
        match body.strip_prefix("casimir ") {
            Some(v) if version.is_empty() => version = v.to_string(),
            _ => config.push(body),
        }
    }
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let idx = |name: &str| -> CliResult<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("missing column '{name}'")))
    };
    let kinds: Vec<QuantityKind> = QuantityKind::ALL
        .into_iter()
        .filter(|k| header.contains(&QuantityValues::empty(*k).columns()[0].0))
        .collect();
    let base = ["d_m", "e", "method", "sphere", "plate"].map(|c| idx(c)).into_iter().collect::<CliResult<Vec<_>>>()?;
    let diag = DIAG_COLUMNS.map(|c| idx(c)).into_iter().collect::<CliResult<Vec<_>>>()?;
    let status = idx("status")?;
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize| parse_f64(&header[i], &row[i], line);
        let int = |i: usize| -> CliResult<usize> {
            row[i]
                .parse()
                .map_err(|_| CliError::Data(format!("line {line}, column {}: not an integer", header[i])))
        };
        let need = |v: Option<f64>, i: usize| v.ok_or_else(|| CliError::Data(format!("line {line}: empty {}", header[i])));
        let mut values = Vec::new();
        for k in &kinds {
            let cols = QuantityValues::empty(*k).columns();
            let mut got = [None; 6];
            for (slot, (name, _)) in got.iter_mut().zip(cols.iter()) {
                *slot = num(idx(name)?)?;
            }
            values.push(QuantityValues {
                kind: *k,
                leading: got[0],
                ntlo: got[1],
                sum: got[2],
                normalized_leading: got[3],
                normalized_sum: got[4],
                theta: got[5],
            });
        }
        records.push(ResultRecord {
            d: need(num(base[0])?, base[0])?,
            e: need(num(base[1])?, base[1])?,
            method: row[base[2]].to_string(),
            sphere: row[base[3]].to_string(),
            plate: row[base[4]].to_string(),
            values,
            diagnostics: RecordDiagnostics {
                s_terms: int(diag[0])?,
                phi_nodes: int(diag[1])?,
                t_nodes: int(diag[2])?,
                refinements: int(diag[3])?,
                error_estimate: need(num(diag[4])?, diag[4])?,
                l_max: int(diag[5])?,
                xi_nodes: int(diag[6])?,
            },
            status: row[status].to_string(),
        });
    }
    let mut config = config.join("\n");
    if !config.is_empty() {
        config.push('\n');
    }
    Ok(Document { metadata: Metadata { version, config }, records })
}

pub fn read_json(text: &str) -> CliResult<Document> {
    serde_json::from_str(text).map_err(|e| CliError::Data(e.to_string()))
}

/// Reads either format; JSON is recognised by a leading '{'.
pub fn read_document(path: &Path) -> CliResult<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let doc = if text.trim_start().starts_with('{') { read_json(&text) } else { read_csv(&text) };
    doc.map_err(|e| match e {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}
