use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geneo_cli::{run, ProblemKind, RunConfig, RunError};

#[derive(Parser)]
#[command(
    name = "geneo",
    version,
    about = "Overlapping Schwarz solver studies on layered hexahedral grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a study described by a config file and/or overrides.
    Run {
        /// key = value config file.
        config: Option<PathBuf>,
        /// Override a config key, e.g. `-s partitions=4,8,16`.
        #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(short, long)]
        workers: Option<usize>,
    },
    /// Print the default configuration.
    Defaults,
}

fn load(
    config: Option<PathBuf>,
    overrides: &[String],
    output: Option<PathBuf>,
    workers: Option<usize>,
) -> Result<RunConfig, RunError> {
    let mut cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|source| RunError::Io {
                context: format!("reading {}", path.display()),
                source,
            })?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for o in overrides {
        cfg.apply_override(o)?;
    }
    if let Some(o) = output {
        cfg.output = o;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Defaults => {
            print!("{}", RunConfig::default().to_text());
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            overrides,
            output,
            workers,
        } => {
            let result = load(config, &overrides, output, workers).and_then(|cfg| run(&cfg).map(|r| (cfg, r)));
            match result {
                Ok((cfg, report)) => {
                    print!("{}", report.to_table());
                    if cfg.problem == ProblemKind::Plate1a {
                        if let Some(r) = report.rows.first() {
                            println!("maximum vertical displacement: {:.6} mm", r.qoi);
                        }
                    }
                    println!("artifacts written to {}", cfg.output.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
