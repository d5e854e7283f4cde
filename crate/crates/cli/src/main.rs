use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nctda::cumulants::CumulantKind;
use nctda::snf::Ring;
use nctda::tda::{ComplexType, CurveConfig, Engine};
use nctda_cli::{
    check_distinct, cmd_betti, cmd_cloud, cmd_cumulants, cmd_curves, parse_complex, parse_engine, parse_kind,
    parse_ring, read_file, write_file, BettiRoute, CliError, CliResult, CloudKind, GridSpec, TransformDirection,
};

#[derive(Parser)]
#[command(name = "nctda", version, about = "Betti numbers, cumulants and random-matrix point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers of a complex file (one facet per line).
    Betti {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Spectral route through Laplacian kernels; ignored when --ring is given.
        #[arg(long, value_parser = parse_engine)]
        engine: Option<Engine>,
        /// Smith normal form route over z or gf2.
        #[arg(long, value_parser = parse_ring)]
        ring: Option<Ring>,
    },
    /// Betti curves of a point cloud CSV over a radius grid.
    Curves {
        #[arg(long)]
        input: PathBuf,
        /// Curves CSV; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Barcode SVG; defaults to the output path with an .svg extension.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Persistence pairs CSV.
        #[arg(long)]
        bars: Option<PathBuf>,
        #[arg(long)]
        grid: GridSpec,
        #[arg(long, default_value_t = 2)]
        maxdim: usize,
        #[arg(long, value_parser = parse_engine, default_value = "gf2")]
        engine: Engine,
        #[arg(long, value_parser = parse_complex, default_value = "rips")]
        complex: ComplexType,
        /// Also evaluate at every edge and triangle birth inside the grid.
        #[arg(long)]
        critical: bool,
    },
    /// Sample a point cloud: disk, circle, torus-ind or torus-rep.
    Cloud {
        #[arg(long)]
        kind: CloudKind,
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long = "big-r", default_value_t = 2.0)]
        big_r: f64,
        #[arg(long = "small-r", default_value_t = 1.0)]
        small_r: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exact moment-cumulant transforms of a `k,value` CSV.
    Cumulants {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = parse_kind)]
        kind: CumulantKind,
        #[arg(long, default_value = "to-cumulants")]
        direction: TransformDirection,
    },
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Betti {
            input,
            output,
            engine,
            ring,
        } => {
            check_distinct(&input, &[output.as_deref()])?;
            let route = match (engine, ring) {
                (Some(Engine::Spectral), Some(_)) => {
                    return Err(CliError::Usage("--engine spectral and --ring select different routes".into()))
                }
                (_, Some(r)) => BettiRoute::Smith(r),
                (Some(Engine::Gf2), None) => BettiRoute::Smith(Ring::Gf2),
                (Some(Engine::Spectral) | None, None) => BettiRoute::Spectral,
            };
            let report = cmd_betti(&read_file(&input)?, route)?;
            emit(output.as_deref(), &report)
        }
        Command::Curves {
            input,
            output,
            svg,
            bars,
            grid,
            maxdim,
            engine,
            complex,
            critical,
        } => {
            let svg = svg.or_else(|| output.as_ref().map(|p| p.with_extension("svg")));
            check_distinct(&input, &[output.as_deref(), svg.as_deref(), bars.as_deref()])?;
            let cfg = CurveConfig {
                complex,
                engine,
                maxdim,
                critical,
            };
            let (result, stopped) = cmd_curves(&read_file(&input)?, grid, &cfg);
            let out = result?;
            emit(output.as_deref(), &out.csv)?;
            if let Some(p) = &svg {
                write_file(p, &out.svg)?;
            }
            if let Some(p) = &bars {
                write_file(p, &out.bars_csv)?;
            }
            eprint!("{}", out.report);
            match stopped {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Cloud {
            kind,
            n,
            seed,
            big_r,
            small_r,
            output,
        } => {
            let out = cmd_cloud(kind, n, big_r, small_r, seed)?;
            emit(output.as_deref(), &out.csv)?;
            eprint!("{}", out.summary);
            Ok(())
        }
        Command::Cumulants {
            input,
            output,
            kind,
            direction,
        } => {
            check_distinct(&input, &[output.as_deref()])?;
            let out = cmd_cumulants(&read_file(&input)?, kind, direction)?;
            emit(output.as_deref(), &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
