use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use casimir_cli::compare::{compare, write_comparison};
use casimir_cli::config::{read_file, DistanceMode, FileConfig, Format, Method, Overrides, Quantity, Route, RunConfig};
use casimir_cli::error::{CliError, CliResult};
use casimir_cli::record::read_document;
use casimir_cli::run::{emit, run};
use casimir_cli::tables::{write_tables, TableFormat};

/// Casimir interaction between a sphere and a plate: PFA, next-to-leading
/// order expansion, perfect-conductor series and the exact determinant.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true, env = "CASIMIR_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate at a single distance.
    Compute(RunArgs),
    /// Evaluate over a distance sweep.
    Sweep(RunArgs),
    /// Exact scattering-determinant energy (single distance or sweep).
    Oracle(RunArgs),
    /// Ratios a/b of matching columns of two result files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Columns to compare (default: all common value columns).
        #[arg(long, value_delimiter = ',')]
        keys: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the β and λ coefficient tables.
    Tables {
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    #[arg(long, value_enum)]
    quantity: Option<Quantity>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
    /// Sphere radius, m.
    #[arg(long)]
    radius: Option<f64>,
    /// Sphere-plate gap, m.
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    d_min: Option<f64>,
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Logarithmic spacing (default for sweeps).
    #[arg(long, conflicts_with = "linear")]
    log: bool,
    #[arg(long)]
    linear: bool,
    /// e.g. pc, plasma:wp=9eV, drude:wp=9eV,gamma=0.035eV, table:eps.txt
    #[arg(long)]
    sphere: Option<String>,
    #[arg(long)]
    plate: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    phi_nodes: Option<usize>,
    #[arg(long)]
    t_nodes: Option<usize>,
    #[arg(long)]
    rel_tol_leading: Option<f64>,
    #[arg(long)]
    rel_tol_ntlo: Option<f64>,
    #[arg(long)]
    s_max: Option<usize>,
    /// Skip the quadrature refinement check.
    #[arg(long)]
    no_refine: bool,
    #[arg(long)]
    max_refinements: Option<usize>,
    #[arg(long)]
    lifshitz_nodes: Option<usize>,
    #[arg(long, value_enum)]
    pfa_route: Option<Route>,
    #[arg(long)]
    pc_order: Option<usize>,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    xi_nodes: Option<usize>,
    #[arg(long)]
    theta_nodes: Option<usize>,
    #[arg(long)]
    oracle_tolerance: Option<f64>,
}

impl RunArgs {
    fn overrides(self) -> Overrides {
        let mut ov = Overrides {
            quantity: self.quantity,
            method: self.method,
            jobs: self.jobs,
            radius: self.radius,
            distance: self.distance,
            d_min: self.d_min,
            d_max: self.d_max,
            points: self.points,
            log: if self.log { Some(true) } else if self.linear { Some(false) } else { None },
            sphere: self.sphere,
            plate: self.plate,
            output: self.output,
            format: self.format,
            ..Default::default()
        };
        let q = &mut ov.quad;
        q.phi_nodes = self.phi_nodes;
        q.t_nodes = self.t_nodes;
        q.rel_tol_leading = self.rel_tol_leading;
        q.rel_tol_ntlo = self.rel_tol_ntlo;
        q.s_max = self.s_max;
        q.refine_check = self.no_refine.then_some(false);
        q.max_refinements = self.max_refinements;
        q.lifshitz_nodes = self.lifshitz_nodes;
        q.pfa_route = self.pfa_route;
        q.pc_order = self.pc_order;
        q.l_max = self.l_max;
        q.xi_nodes = self.xi_nodes;
        q.theta_nodes = self.theta_nodes;
        q.oracle_tolerance = self.oracle_tolerance;
        ov
    }
}

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run_command(config: Option<PathBuf>, args: RunArgs, mode: DistanceMode, oracle: bool) -> CliResult<()> {
    let file = match &config {
        Some(p) => read_file(p)?,
        None => FileConfig::default(),
    };
    let mut ov = args.overrides();
    if oracle {
        if ov.method.is_some_and(|m| m != Method::Exact) {
            return Err(CliError::field("--method", "the oracle subcommand always uses the exact method"));
        }
        ov.method = Some(Method::Exact);
        ov.quantity.get_or_insert(Quantity::Energy);
    }
    let cfg = RunConfig::resolve(file, ov, mode)?;
    let (doc, failure) = run(&cfg)?;
    emit(&doc, &cfg)?;
    match failure {
        Some(e) => {
            let failed = doc.records.iter().filter(|r| !r.is_ok()).count();
            eprintln!("{failed} of {} points failed; results written with status flags", doc.records.len());
            Err(e)
        }
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => run_command(cli.config, a, DistanceMode::Single, false),
        Command::Sweep(a) => run_command(cli.config, a, DistanceMode::Sweep, false),
        Command::Oracle(a) => run_command(cli.config, a, DistanceMode::Either, true),
        Command::Compare { a, b, keys, output } => (|| {
            let c = compare(&read_document(&a)?, &read_document(&b)?, &keys)?;
            let mut out = open_output(&output)?;
            write_comparison(&c, &mut out)?;
            out.flush()?;
            Ok(())
        })(),
        Command::Tables { format, output } => (|| {
            let mut out = open_output(&output)?;
            write_tables(format, &mut out)?;
            out.flush()?;
            Ok(())
        })(),
    };
    match result {
        Ok(()) | Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("casimir: {e}");
            e.exit_code()
        }
    }
}
