use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use membrane_cli::{
    check_case_flags, mesh_info, run_case, run_convergence, Case, Mode, Overrides, RunConfig, Variant,
};

#[derive(Parser)]
#[command(name = "membrane", version, about = "Linear membrane shell solver on triangulated surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case and write solution.vtk and report.txt.
    Run(Common),
    /// Solve a resolution ladder and fit the stress-error rate.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated resolutions, e.g. 16,32,64,128.
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Print mesh statistics without solving.
    MeshInfo(Common),
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Option<Case>,
    /// Mesh file (.off or .obj) for the import case.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    variant: Option<Variant>,
    /// Cylinder radius or torus tube radius.
    #[arg(long = "r")]
    r: Option<f64>,
    #[arg(long = "L")]
    length: Option<f64>,
    #[arg(long = "R")]
    major: Option<f64>,
    #[arg(long = "E")]
    young: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long = "t")]
    t: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Total pulling force (cylinder).
    #[arg(long = "F")]
    force: Option<f64>,
    /// Pressure (torus, import).
    #[arg(long = "p")]
    p: Option<f64>,
    /// Quadrature order (1 or 2).
    #[arg(long)]
    quadrature: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn into_config(self, resolutions: Option<Vec<usize>>) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let (force_given, pressure_given) = (self.force.is_some(), self.p.is_some());
        let config = Overrides {
            case: self.case,
            r: self.r,
            length: self.length,
            major: self.major,
            young: self.young,
            nu: self.nu,
            t: self.t,
            mode: self.mode,
            force: self.force,
            p: self.p,
            n: self.n,
            resolutions,
            variant: self.variant,
            quadrature: self.quadrature,
            tol: self.tol,
            max_iter: self.max_iter,
            out: self.out,
            mesh: self.mesh,
        }
        .apply(base);
        check_case_flags(&config, force_given, pressure_given)?;
        config.validate()?;
        Ok(config)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(common) => {
            let config = common.into_config(None)?;
            let (outcome, artifacts) = run_case(&config)?;
            println!("{}", outcome.report);
            if let Some(e) = outcome.l2_error {
                println!("L2 stress error = {e:.6e}");
            }
            for p in &artifacts.paths {
                println!("wrote {}", p.display());
            }
        }
        Command::Convergence { common, resolutions } => {
            let config = common.into_config(resolutions)?;
            let (outcome, artifacts) = run_convergence(&config)?;
            for (&(h, e), rate) in outcome.record.samples.iter().zip(outcome.record.pairwise_rates()) {
                match rate {
                    Some(r) => println!("h = {h:.4e}  error = {e:.6e}  rate = {r:.3}"),
                    None => println!("h = {h:.4e}  error = {e:.6e}"),
                }
            }
            println!("fitted slope = {:.4}", outcome.record.slope);
            for p in &artifacts.paths {
                println!("wrote {}", p.display());
            }
        }
        Command::MeshInfo(common) => {
            let config = common.into_config(None)?;
            print!("{}", mesh_info(&config)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
