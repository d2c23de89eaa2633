//! β and λ coefficient tables of the perfect-conductor series.

use std::io::Write;

use casimir_core::pc_series::table;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableEntry {
    pub table: &'static str,
    pub i: usize,
    pub j: usize,
    pub exact: String,
    pub decimal: f64,
}

pub fn entries() -> Vec<TableEntry> {
    let t = table();
    let mut out = Vec::new();
    for (name, map) in [("beta", &t.beta), ("lambda", &t.lambda)] {
        let mut keys: Vec<_> = map.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| (i + j, std::cmp::Reverse(i)));
        for (i, j) in keys {
            let v = map[&(i, j)];
            out.push(TableEntry { table: name, i, j, exact: v.to_string(), decimal: v.to_f64() });
        }
    }
    out
}

pub fn write_tables<W: Write>(format: TableFormat, mut out: W) -> CliResult<()> {
    let es = entries();
    match format {
        TableFormat::Text => {
            for e in &es {
                writeln!(out, "{}({},{}) = {:<44} = {:.6}", e.table, e.i, e.j, e.exact, e.decimal)?;
            }
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["table", "i", "j", "exact", "decimal"])?;
            for e in &es {
                w.write_record([e.table.to_string(), e.i.to_string(), e.j.to_string(), e.exact.clone(), format!("{:.16e}", e.decimal)])?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &es).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}
