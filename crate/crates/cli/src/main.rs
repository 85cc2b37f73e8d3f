use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use hwlod::mesh::AxisSpec;
use hwlod::tables::TableId;
use hwlod_cli::{
    execute_boundary, execute_compare_1d, execute_mesh, execute_run, execute_table, mesh_spec,
    MeshKind, ProblemKind, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "hwlod",
    version,
    about = "Fitted finite-volume LOD solver for the Hull-White stochastic volatility PDE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write the requested artifacts.
    Run(RunArgs),
    /// Reproduce a convergence table.
    Table {
        #[arg(long)]
        id: TableId,
        #[arg(long, env = "HWLOD_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Print the nodes of one axis as CSV.
    Mesh(MeshArgs),
    /// Write the Dirichlet data of a problem as CSV.
    Boundary(RunArgs),
    /// Compare the final 2D slice at y = sigma^2 with a 1D solve.
    #[command(name = "compare-1d")]
    Compare1d {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<ProblemKind>,
    /// x intervals.
    #[arg(long)]
    n: Option<usize>,
    /// y intervals.
    #[arg(long)]
    m: Option<usize>,
    /// Time steps.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Cash amount of the cash-or-nothing problem.
    #[arg(long)]
    cash: Option<f64>,
    /// Comma-separated time-step indices to dump.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
    /// Also write the boundary profiles.
    #[arg(long)]
    boundaries: bool,
    #[arg(long, env = "HWLOD_OUT_DIR")]
    out: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, self.problem) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(kind)) => RunConfig::preset(kind),
            (None, None) => RunConfig::preset(ProblemKind::Tp1),
        };
        if let Some(kind) = self.problem {
            if cfg.problem != kind {
                cfg.problem = kind;
                cfg.cash = match kind {
                    ProblemKind::Tp2 => cfg.cash.or(Some(1.0)),
                    _ => None,
                };
            }
        }
        if let Some(n) = self.n {
            cfg.x_axis = cfg.x_axis.with_intervals(n);
        }
        if let Some(m) = self.m {
            cfg.y_axis = cfg.y_axis.with_intervals(m);
        }
        if let Some(k) = self.k {
            cfg.steps = k;
        }
        if let Some(zeta) = self.zeta {
            let mut d = match cfg.domain {
                Some(d) => d,
                None => {
                    cfg.build_problem()
                        .context("resolving the domain for --zeta")?
                        .domain
                }
            };
            d.zeta = zeta;
            cfg.domain = Some(d);
        }
        if let Some(cash) = self.cash {
            cfg.cash = Some(cash);
        }
        if let Some(s) = &self.snapshots {
            cfg.artifacts.snapshots = s.clone();
        }
        if self.boundaries {
            cfg.artifacts.boundaries = true;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, default_value = "uniform")]
    spec: MeshKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    lo: f64,
    #[arg(long, default_value_t = 100.0)]
    hi: f64,
    /// sinh-origin: d = (hi - lo) / d_div.
    #[arg(long, default_value_t = 700.0)]
    d_div: f64,
    /// sinh-strike: cluster point, relative to lo.
    #[arg(long, default_value_t = 57.0)]
    strike: f64,
    /// sinh-strike: c = strike / c_div.
    #[arg(long, default_value_t = 5.0)]
    c_div: f64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn emit(csv: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            if args.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let report = execute_run(&cfg)?;
            for p in &report.written {
                eprintln!("wrote {}", p.display());
            }
            println!("{}", report.summary());
        }
        Command::Table { id, out } => {
            let (text, written) = execute_table(id, &out)?;
            print!("{text}");
            for p in &written {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Mesh(args) => {
            let spec: AxisSpec = mesh_spec(
                args.spec,
                args.n,
                args.lo,
                args.hi,
                args.d_div,
                args.strike,
                args.c_div,
            );
            emit(
                &execute_mesh(&spec, args.lo, args.hi)?,
                args.output.as_ref(),
            )?;
        }
        Command::Boundary(args) => {
            let cfg = args.resolve()?;
            if args.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let csv = execute_boundary(&cfg)?;
            fs::create_dir_all(&cfg.out_dir)?;
            let path = cfg.out_dir.join("boundaries.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        Command::Compare1d { run, sigma } => {
            let cfg = run.resolve()?;
            if run.print_config {
                println!("{}", cfg.to_json());
                return Ok(());
            }
            let csv = execute_compare_1d(&cfg, sigma)?;
            fs::create_dir_all(&cfg.out_dir)?;
            let path = cfg.out_dir.join("compare_1d.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
