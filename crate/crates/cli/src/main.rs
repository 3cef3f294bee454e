use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ncmech::polyalg::ScalarMode;
use ncmech_cli::{run, CliError, Command, ConfigFile, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Simulate,
    GaugeVerify,
    SeriesDump,
    DarbouxCompare,
    Strength,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::GaugeVerify => Command::GaugeVerify,
            Sub::SeriesDump => Command::SeriesDump,
            Sub::DarbouxCompare => Command::DarbouxCompare,
            Sub::Strength => Command::Strength,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

/// Noncommutative particle mechanics: simulations and symbolic checks.
#[derive(Debug, Parser)]
#[command(name = "ncmech", version)]
struct Args {
    #[arg(value_enum)]
    command: Sub,
    /// JSON scenario file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Truncation order of the gauge series.
    #[arg(long)]
    order: Option<usize>,
    /// constant-b, harmonic, saddle, combined or dh-compare.
    #[arg(long)]
    preset: Option<String>,
}

fn execute(args: &Args) -> Result<bool, CliError> {
    let cfg = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None if args.preset.is_some() => ConfigFile::default(),
        None => return Err(CliError::Config("give --config or --preset".into())),
    };
    let ov = Overrides {
        mode: args.mode.map(|m| match m {
            Mode::Exact => ScalarMode::Exact,
            Mode::Float => ScalarMode::Float,
        }),
        order: args.order,
        preset: args.preset.clone(),
    };
    let outcome = run(args.command.into(), &cfg, &ov)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            for a in &outcome.artifacts {
                let path = dir.join(&a.file_name);
                std::fs::write(&path, &a.contents)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in &outcome.artifacts {
                match stdout.write_all(a.contents.as_bytes()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => break,
                    r => r.map_err(|e| CliError::Io(e.to_string()))?,
                }
            }
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "ncmech: {} reported failed checks",
                Command::from(args.command)
            );
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ncmech: {e}");
            ExitCode::from(2)
        }
    }
}
