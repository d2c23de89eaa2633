//! Evaluation of one configuration over its distance grid.

use std::fs::File;
use std::io::{BufWriter, Write};

use casimir_core::ntlo::{compute_all, Diagnostics};
use casimir_core::oracle::exact_energy_detailed;
use casimir_core::pc_series::pc_series_parts;
use casimir_core::pfa::{pfa_energy, pfa_force, pfa_gradient};
use casimir_core::{Geometry, Kind};
use rayon::prelude::*;

use crate::config::{Format, Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::record::{
    write_csv, write_json, Document, Metadata, QuantityKind, QuantityValues, RecordDiagnostics, ResultRecord, VERSION,
};

fn diag_from(d: &Diagnostics) -> RecordDiagnostics {
    RecordDiagnostics {
        s_terms: d.s_terms,
        phi_nodes: d.phi_nodes,
        t_nodes: d.t_nodes,
        refinements: d.refinements,
        error_estimate: d.error_estimate,
        ..Default::default()
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// c/(ω_p d) for the perfect-conductor series; zero for a perfect conductor.
fn series_parameter(omega_p: f64, d: f64) -> f64 {
    if omega_p.is_infinite() {
        0.0
    } else {
        casimir_core::constants::C / (omega_p * d)
    }
}

fn evaluate(cfg: &RunConfig, geom: &Geometry) -> CliResult<(Vec<QuantityValues>, RecordDiagnostics)> {
    let (m1, m2) = cfg.materials();
    let (s, p) = (&m1.model, &m2.model);
    let kinds = cfg.quantity.kinds();
    let quad = cfg.quad_settings();
    match cfg.method {
        Method::Ntlo => {
            let set = compute_all(s, p, geom, &quad)?;
            let vals = kinds
                .iter()
                .map(|&k| {
                    let r = set.get(k);
                    QuantityValues {
                        kind: k.into(),
                        leading: finite(r.leading),
                        ntlo: finite(r.ntlo),
                        sum: finite(r.sum()),
                        normalized_leading: finite(r.normalized_leading),
                        normalized_sum: finite(r.normalized_sum),
                        theta: finite(r.theta),
                    }
                })
                .collect();
            Ok((vals, diag_from(&set.energy.diagnostics)))
        }
        Method::Pfa => {
            let vals = kinds
                .iter()
                .map(|&k| {
                    let v = match k {
                        Kind::Energy => pfa_energy(s, p, geom, &quad, cfg.pfa_route())?,
                        Kind::Force => pfa_force(s, p, geom, &quad)?,
                        Kind::Gradient => pfa_gradient(s, p, geom, &quad)?,
                    };
                    let norm = v / k.pc_reference(geom);
                    Ok(QuantityValues {
                        leading: finite(v),
                        sum: finite(v),
                        normalized_leading: finite(norm),
                        normalized_sum: finite(norm),
                        ..QuantityValues::empty(k.into())
                    })
                })
                .collect::<CliResult<_>>()?;
            let diag = RecordDiagnostics { phi_nodes: quad.phi_nodes, t_nodes: quad.t_nodes, ..Default::default() };
            Ok((vals, diag))
        }
        Method::PcSeries => {
            let a1 = series_parameter(m1.plasma_frequency().unwrap_or(f64::NAN), geom.distance);
            let a2 = series_parameter(m2.plasma_frequency().unwrap_or(f64::NAN), geom.distance);
            let vals = kinds
                .iter()
                .map(|&k| {
                    let (lead, first) = pc_series_parts(k, a1, a2, cfg.pc_order())?;
                    let reference = k.pc_reference(geom);
                    let ntlo = geom.e * first;
                    Ok(QuantityValues {
                        kind: k.into(),
                        leading: finite(lead * reference),
                        ntlo: finite(ntlo * reference),
                        sum: finite((lead + ntlo) * reference),
                        normalized_leading: finite(lead),
                        normalized_sum: finite(lead + ntlo),
                        theta: finite(first / lead),
                    })
                })
                .collect::<CliResult<_>>()?;
            Ok((vals, RecordDiagnostics::default()))
        }
        Method::Exact => {
            let trunc = cfg.truncation(geom);
            let r = exact_energy_detailed(s, p, geom, &trunc)?;
            let norm = r.energy / Kind::Energy.pc_reference(geom);
            let vals = vec![QuantityValues {
                sum: finite(r.energy),
                normalized_sum: finite(norm),
                ..QuantityValues::empty(QuantityKind::Energy)
            }];
            let diag = RecordDiagnostics {
                error_estimate: if r.energy != 0.0 { (r.error_estimate / r.energy).abs() } else { 0.0 },
                l_max: r.l_max,
                xi_nodes: r.xi_nodes,
                ..Default::default()
            };
            Ok((vals, diag))
        }
    }
}

/// One record per distance, in input order. Failed points are kept and
/// flagged; the first failure is returned alongside.
pub fn run(cfg: &RunConfig) -> CliResult<(Document, Option<CliError>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("[run].jobs: {e}")))?;
    let distances = cfg.distances.values();
    let (m1, m2) = cfg.materials();
    let outcomes: Vec<(ResultRecord, Option<CliError>)> = pool.install(|| {
        distances
            .par_iter()
            .map(|&d| {
                let mut rec = ResultRecord {
                    d,
                    e: d / cfg.radius,
                    method: cfg.method.name().to_string(),
                    sphere: m1.spec.clone(),
                    plate: m2.spec.clone(),
                    values: cfg.quantity.kinds().into_iter().map(|k| QuantityValues::empty(k.into())).collect(),
                    diagnostics: RecordDiagnostics::default(),
                    status: "ok".into(),
                };
                let outcome = Geometry::new(cfg.radius, d).map_err(CliError::from).and_then(|g| evaluate(cfg, &g));
                match outcome {
                    Ok((values, diagnostics)) => {
                        rec.values = values;
                        rec.diagnostics = diagnostics;
                        (rec, None)
                    }
                    Err(e) => {
                        rec.status = format!("error: {e}");
                        (rec, Some(e))
                    }
                }
            })
            .collect()
    });
    let mut first_err = None;
    let mut records = Vec::with_capacity(outcomes.len());
    for (rec, err) in outcomes {
        if first_err.is_none() {
            first_err = err;
        }
        records.push(rec);
    }
    let doc = Document {
        metadata: Metadata { version: VERSION.to_string(), config: cfg.echo() },
        records,
    };
    Ok((doc, first_err))
}

pub fn emit(doc: &Document, cfg: &RunConfig) -> CliResult<()> {
    match &cfg.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_doc(doc, cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            write_doc(doc, cfg.format, stdout.lock())?;
        }
    }
    Ok(())
}

fn write_doc<W: Write>(doc: &Document, format: Format, w: W) -> CliResult<()> {
    match format {
        Format::Csv => write_csv(doc, w),
        Format::Json => write_json(doc, w),
    }
}
