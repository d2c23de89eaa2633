//! Run configuration: a TOML file (sections `[run]`, `[geometry]`, `[sweep]`,
//! `[materials]`, `[quadrature]`, `[output]`) merged with command-line
//! overrides. Flags win over file values.

use std::path::{Path, PathBuf};

use casimir_core::oracle::TruncationSpec;
use casimir_core::pfa::PfaRoute;
use casimir_core::{Geometry, Kind, QuadratureSettings};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::material::{parse_material, Material};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Energy,
    Force,
    Gradient,
    All,
}

impl Quantity {
    pub fn kinds(self) -> Vec<Kind> {
        match self {
            Quantity::Energy => vec![Kind::Energy],
            Quantity::Force => vec![Kind::Force],
            Quantity::Gradient => vec![Kind::Gradient],
            Quantity::All => Kind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pfa,
    Ntlo,
    PcSeries,
    Exact,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pfa => "pfa",
            Method::Ntlo => "ntlo",
            Method::PcSeries => "pc-series",
            Method::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Lifshitz,
    Reduced,
}

impl From<Route> for PfaRoute {
    fn from(r: Route) -> Self {
        match r {
            Route::Lifshitz => PfaRoute::LifshitzIntegral,
            Route::Reduced => PfaRoute::ReducedDoubleIntegral,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub materials: MaterialsSection,
    #[serde(default)]
    pub quadrature: QuadSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub quantity: Option<Quantity>,
    pub method: Option<Method>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Sphere radius, m.
    pub radius: Option<f64>,
    /// Single sphere-plate gap, m.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "yes")]
    pub log: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialsSection {
    pub sphere: Option<String>,
    pub plate: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadSection {
    pub phi_nodes: Option<usize>,
    pub t_nodes: Option<usize>,
    pub rel_tol_leading: Option<f64>,
    pub rel_tol_ntlo: Option<f64>,
    pub s_max: Option<usize>,
    pub refine_check: Option<bool>,
    pub max_refinements: Option<usize>,
    pub lifshitz_nodes: Option<usize>,
    pub pfa_route: Option<Route>,
    pub pc_order: Option<usize>,
    pub l_max: Option<usize>,
    pub xi_nodes: Option<usize>,
    pub theta_nodes: Option<usize>,
    pub oracle_tolerance: Option<f64>,
}

impl QuadSection {
    /// Fields set in `other` replace those here.
    pub fn merge(&mut self, other: &QuadSection) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            phi_nodes, t_nodes, rel_tol_leading, rel_tol_ntlo, s_max, refine_check, max_refinements,
            lifshitz_nodes, pfa_route, pc_order, l_max, xi_nodes, theta_nodes, oracle_tolerance
        );
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub quantity: Option<Quantity>,
    pub method: Option<Method>,
    pub jobs: Option<usize>,
    pub radius: Option<f64>,
    pub distance: Option<f64>,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub points: Option<usize>,
    pub log: Option<bool>,
    pub sphere: Option<String>,
    pub plate: Option<String>,
    pub quad: QuadSection,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

/// What the subcommand expects for the distance input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Single,
    Sweep,
    Either,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Distances {
    Single(f64),
    Sweep(SweepSpec),
}

impl Distances {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Distances::Single(d) => vec![d],
            Distances::Sweep(s) => (0..s.points)
                .map(|i| {
                    let f = i as f64 / (s.points - 1) as f64;
                    if i == 0 {
                        s.min
                    } else if i == s.points - 1 {
                        s.max
                    } else if s.log {
                        (s.min.ln() + f * (s.max.ln() - s.min.ln())).exp()
                    } else {
                        s.min + f * (s.max - s.min)
                    }
                })
                .collect(),
        }
    }
}

/// Fully resolved configuration. Serializes to the TOML echoed in output
/// preambles.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub quantity: Quantity,
    pub method: Method,
    pub jobs: usize,
    pub radius: f64,
    pub distances: Distances,
    pub sphere: String,
    pub plate: String,
    pub quadrature: QuadSection,
    pub output: Option<PathBuf>,
    pub format: Format,
    #[serde(skip)]
    pub materials: Option<(Material, Material)>,
}

pub fn read_file(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_file(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_file(text: &str) -> CliResult<FileConfig> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn positive(field: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::field(field, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> CliResult<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::field(field, format!("must be at least {min}, got {v}")))
    }
}

fn unit_interval(field: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(CliError::field(field, format!("must lie in (0, 1), got {v}")))
    }
}

impl RunConfig {
    pub fn resolve(file: FileConfig, ov: Overrides, mode: DistanceMode) -> CliResult<Self> {
        let quantity = ov.quantity.or(file.run.quantity).unwrap_or(Quantity::All);
        let method = ov.method.or(file.run.method).unwrap_or(Method::Ntlo);
        let jobs = match ov.jobs.or(file.run.jobs) {
            Some(j) => at_least("[run].jobs", j, 1)?,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let radius = positive(
            "[geometry].radius",
            ov.radius.or(file.geometry.radius).ok_or_else(|| CliError::field("[geometry].radius", "required"))?,
        )?;

        let single = ov.distance.or(file.geometry.distance);
        let sweep = {
            let base = file.sweep;
            let any_flag = ov.d_min.is_some() || ov.d_max.is_some() || ov.points.is_some() || ov.log.is_some();
            match (base, any_flag) {
                (None, false) => None,
                (base, _) => {
                    let get = |o: Option<f64>, b: Option<f64>, name: &str| {
                        o.or(b).ok_or_else(|| CliError::field(&format!("[sweep].{name}"), "required"))
                    };
                    Some(SweepSpec {
                        min: get(ov.d_min, base.map(|b| b.min), "min")?,
                        max: get(ov.d_max, base.map(|b| b.max), "max")?,
                        points: ov
                            .points
                            .or(base.map(|b| b.points))
                            .ok_or_else(|| CliError::field("[sweep].points", "required"))?,
                        log: ov.log.or(base.map(|b| b.log)).unwrap_or(true),
                    })
                }
            }
        };
        let distances = match (mode, single, sweep) {
            (DistanceMode::Single, Some(d), _) | (DistanceMode::Either, Some(d), None) => Distances::Single(d),
            (DistanceMode::Sweep, _, Some(s)) | (DistanceMode::Either, None, Some(s)) => Distances::Sweep(s),
            (DistanceMode::Single, None, _) => {
                return Err(CliError::field("[geometry].distance", "required for a single computation"))
            }
            (DistanceMode::Sweep, _, None) => return Err(CliError::field("[sweep]", "required for a sweep")),
            (DistanceMode::Either, Some(_), Some(_)) => {
                return Err(CliError::field("[geometry].distance", "conflicts with [sweep]; give one of them"))
            }
            (DistanceMode::Either, None, None) => {
                return Err(CliError::field("[geometry].distance", "give a distance or a [sweep]"))
            }
        };
        match &distances {
            Distances::Single(d) => {
                positive("[geometry].distance", *d)?;
            }
            Distances::Sweep(s) => {
                positive("[sweep].min", s.min)?;
                positive("[sweep].max", s.max)?;
                if !(s.min < s.max) {
                    return Err(CliError::field("[sweep].max", format!("must exceed min ({} >= {})", s.min, s.max)));
                }
                at_least("[sweep].points", s.points, 2)?;
            }
        }

        let sphere = ov
            .sphere
            .or(file.materials.sphere)
            .ok_or_else(|| CliError::field("[materials].sphere", "required"))?;
        let plate = ov
            .plate
            .or(file.materials.plate)
            .ok_or_else(|| CliError::field("[materials].plate", "required"))?;
        let m1 = parse_material("[materials].sphere", &sphere)?;
        let m2 = parse_material("[materials].plate", &plate)?;

        let mut quadrature = file.quadrature;
        quadrature.merge(&ov.quad);

        let output = ov.output.or(file.output.path);
        let format = ov
            .format
            .or(file.output.format)
            .or_else(|| match output.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("json") => Some(Format::Json),
                _ => None,
            })
            .unwrap_or(Format::Csv);

        let cfg = RunConfig {
            quantity,
            method,
            jobs,
            radius,
            distances,
            sphere,
            plate,
            quadrature,
            output,
            format,
            materials: Some((m1, m2)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let q = &self.quadrature;
        if let Some(n) = q.phi_nodes {
            at_least("[quadrature].phi_nodes", n, 2)?;
        }
        if let Some(n) = q.t_nodes {
            at_least("[quadrature].t_nodes", n, 2)?;
        }
        if let Some(n) = q.s_max {
            at_least("[quadrature].s_max", n, 4)?;
        }
        if let Some(n) = q.lifshitz_nodes {
            at_least("[quadrature].lifshitz_nodes", n, 2)?;
        }
        if let Some(n) = q.xi_nodes {
            at_least("[quadrature].xi_nodes", n, 8)?;
        }
        if let Some(n) = q.theta_nodes {
            at_least("[quadrature].theta_nodes", n, 8)?;
        }
        if let Some(n) = q.l_max {
            at_least("[quadrature].l_max", n, 1)?;
        }
        if let Some(n) = q.pc_order {
            if n > casimir_core::pc_series::MAX_ORDER {
                return Err(CliError::field(
                    "[quadrature].pc_order",
                    format!("at most {}, got {n}", casimir_core::pc_series::MAX_ORDER),
                ));
            }
        }
        for (name, v) in [
            ("rel_tol_leading", q.rel_tol_leading),
            ("rel_tol_ntlo", q.rel_tol_ntlo),
            ("oracle_tolerance", q.oracle_tolerance),
        ] {
            if let Some(v) = v {
                unit_interval(&format!("[quadrature].{name}"), v)?;
            }
        }
        let (m1, m2) = self.materials();
        match self.method {
            Method::Exact if !matches!(self.quantity, Quantity::Energy) => Err(CliError::field(
                "[run].quantity",
                "the exact method computes the energy only; use quantity = \"energy\"",
            )),
            Method::PcSeries if m1.plasma_frequency().is_none() || m2.plasma_frequency().is_none() => {
                Err(CliError::field(
                    "[run].method",
                    "pc-series needs plasma, Drude or perfect-conductor materials",
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn materials(&self) -> (&Material, &Material) {
        let (a, b) = self.materials.as_ref().expect("resolved config carries materials");
        (a, b)
    }

    pub fn quad_settings(&self) -> QuadratureSettings {
        let q = &self.quadrature;
        let d = QuadratureSettings::default();
        QuadratureSettings {
            phi_nodes: q.phi_nodes.unwrap_or(d.phi_nodes),
            t_nodes: q.t_nodes.unwrap_or(d.t_nodes),
            rel_tol_leading: q.rel_tol_leading.unwrap_or(d.rel_tol_leading),
            rel_tol_ntlo: q.rel_tol_ntlo.unwrap_or(d.rel_tol_ntlo),
            s_max: q.s_max.unwrap_or(d.s_max),
            refine_check: q.refine_check.unwrap_or(d.refine_check),
            max_refinements: q.max_refinements.unwrap_or(d.max_refinements),
            lifshitz_nodes: q.lifshitz_nodes.unwrap_or(d.lifshitz_nodes),
        }
    }

    pub fn pfa_route(&self) -> PfaRoute {
        self.quadrature.pfa_route.unwrap_or(Route::Lifshitz).into()
    }

    pub fn pc_order(&self) -> usize {
        self.quadrature.pc_order.unwrap_or(casimir_core::pc_series::MAX_ORDER)
    }

    pub fn truncation(&self, geom: &Geometry) -> TruncationSpec {
        let q = &self.quadrature;
        let mut t = TruncationSpec::for_geometry(geom);
        if let Some(l) = q.l_max {
            t.l_max = l;
        }
        if let Some(n) = q.xi_nodes {
            t.xi_nodes = n;
        }
        if let Some(n) = q.theta_nodes {
            t.theta_nodes = n;
        }
        if let Some(v) = q.oracle_tolerance {
            t.tolerance = v;
        }
        t
    }

    /// TOML rendering of the resolved configuration.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("unrenderable config: {e}"))
    }
}
