//! Material specs: `vacuum`, `pc`, `plasma:wp=9eV`,
//! `drude:wp=9eV,gamma=0.035eV`, `table:path/to/eps.txt`.
//! Frequencies take an `eV` or `rad/s` suffix.

use casimir_core::constants::ev_to_angular_frequency;
use casimir_core::{DielectricModel, PermittivityTable};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Material {
    pub spec: String,
    pub model: DielectricModel,
}

impl Material {
    /// Plasma frequency in rad/s (infinite for a perfect conductor), used by
    /// the perfect-conductor series.
    pub fn plasma_frequency(&self) -> Option<f64> {
        self.model.plasma_frequency()
    }
}

fn frequency(field: &str, key: &str, raw: &str) -> CliResult<f64> {
    let raw = raw.trim();
    let (num, unit) = if let Some(v) = raw.strip_suffix("eV") {
        (v, "eV")
    } else if let Some(v) = raw.strip_suffix("rad/s") {
        (v, "rad/s")
    } else {
        return Err(CliError::field(field, format!("{key}={raw}: missing unit (eV or rad/s)")));
    };
    let x: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::field(field, format!("{key}={raw}: not a number")))?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(CliError::field(field, format!("{key}={raw}: must be nonnegative")));
    }
    match unit {
        "eV" => Ok(ev_to_angular_frequency(x)?),
        _ => Ok(x),
    }
}

fn params<'a>(field: &str, body: &'a str, allowed: &[&str]) -> CliResult<Vec<(&'a str, &'a str)>> {
    let mut out = Vec::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::field(field, format!("expected key=value, got '{part}'")))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(CliError::field(field, format!("unknown parameter '{k}' (expected {})", allowed.join(", "))));
        }
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(CliError::field(field, format!("parameter '{k}' given twice")));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn required(field: &str, ps: &[(&str, &str)], key: &str) -> CliResult<f64> {
    let (_, v) = ps
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| CliError::field(field, format!("missing parameter '{key}'")))?;
    frequency(field, key, v)
}

/// `field` names the config entry for error messages.
pub fn parse_material(field: &str, spec: &str) -> CliResult<Material> {
    let spec = spec.trim();
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let model = match kind.trim().to_ascii_lowercase().as_str() {
        "vacuum" => DielectricModel::Vacuum,
        "pc" | "perfect" | "perfect-conductor" => DielectricModel::PerfectConductor,
        "plasma" => {
            let ps = params(field, body, &["wp"])?;
            DielectricModel::Plasma { omega_p: required(field, &ps, "wp")? }
        }
        "drude" => {
            let ps = params(field, body, &["wp", "gamma"])?;
            DielectricModel::Drude {
                omega_p: required(field, &ps, "wp")?,
                gamma: required(field, &ps, "gamma")?,
            }
        }
        "table" => {
            if body.trim().is_empty() {
                return Err(CliError::field(field, "table needs a path, e.g. table:eps.txt"));
            }
            let table = PermittivityTable::from_path(body.trim()).map_err(|e| match e {
                casimir_core::Error::Io(m) => CliError::Io(m),
                other => CliError::field(field, other),
            })?;
            DielectricModel::Custom(table)
        }
        other => {
            return Err(CliError::field(
                field,
                format!("unknown material '{other}' (vacuum, pc, plasma:..., drude:..., table:...)"),
            ))
        }
    };
    model.validate().map_err(|e| CliError::field(field, e))?;
    Ok(Material { spec: spec.to_string(), model })
}
