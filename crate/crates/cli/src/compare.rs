//! Column-wise ratios between two result files on the same distance grid.

use std::io::Write;

use crate::error::{CliError, CliResult};
use crate::record::{format_number, Document};

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub d: f64,
    /// a/b per key; None where either side is empty.
    pub ratios: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub keys: Vec<String>,
    pub rows: Vec<RatioRow>,
    /// max |ratio − 1| per key.
    pub max_deviation: Vec<f64>,
}

impl Comparison {
    pub fn overall(&self) -> f64 {
        self.max_deviation.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares `keys` (all common value columns when empty).
pub fn compare(a: &Document, b: &Document, keys: &[String]) -> CliResult<Comparison> {
    if a.records.len() != b.records.len() {
        return Err(CliError::Data(format!(
            "distance grids differ in length ({} vs {})",
            a.records.len(),
            b.records.len()
        )));
    }
    for (i, (ra, rb)) in a.records.iter().zip(&b.records).enumerate() {
        if (ra.d - rb.d).abs() > 1e-12 * ra.d.abs().max(rb.d.abs()) {
            return Err(CliError::Data(format!("distance grids differ at row {i}: {} vs {}", ra.d, rb.d)));
        }
    }
    let cols = |doc: &Document| -> Vec<String> {
        doc.records.first().map(|r| r.value_columns().into_iter().map(|(n, _)| n).collect()).unwrap_or_default()
    };
    let (ca, cb) = (cols(a), cols(b));
    let keys: Vec<String> = if keys.is_empty() {
        ca.iter().filter(|k| cb.contains(k)).cloned().collect()
    } else {
        for k in keys {
            if !ca.contains(k) || !cb.contains(k) {
                return Err(CliError::Data(format!("column '{k}' is not present in both files")));
            }
        }
        keys.to_vec()
    };
    let mut max_deviation = vec![0.0f64; keys.len()];
    let rows = a
        .records
        .iter()
        .zip(&b.records)
        .map(|(ra, rb)| {
            let ratios = keys
                .iter()
                .zip(max_deviation.iter_mut())
                .map(|(k, m)| match (ra.get(k), rb.get(k)) {
                    (Some(x), Some(y)) => {
                        let r = x / y;
                        *m = m.max((r - 1.0).abs());
                        Some(r)
                    }
                    _ => None,
                })
                .collect();
            RatioRow { d: ra.d, ratios }
        })
        .collect();
    Ok(Comparison { keys, rows, max_deviation })
}

/// Ratio table as CSV followed by `#` summary lines.
pub fn write_comparison<W: Write>(c: &Comparison, mut out: W) -> CliResult<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["d_m".to_string()];
        header.extend(c.keys.iter().map(|k| format!("ratio_{k}")));
        w.write_record(&header)?;
        for row in &c.rows {
            let mut rec = vec![format_number(row.d)];
            rec.extend(row.ratios.iter().map(|r| r.map(format_number).unwrap_or_default()));
            w.write_record(&rec)?;
        }
        w.flush()?;
    }
    for (k, m) in c.keys.iter().zip(&c.max_deviation) {
        writeln!(out, "# max |ratio - 1| {k}: {}", format_number(*m))?;
    }
    writeln!(out, "# max |ratio - 1|: {}", format_number(c.overall()))?;
    Ok(())
}
