use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coxfock::shell::{self, Format, GenParams, Kind, ScenarioSpec};
use coxfock::Error;

#[derive(Parser, Debug)]
#[command(name = "coxfock", version, about = "Numerical certificates for braided Fock spaces and Coxeter positivity")]
struct Cli {
    /// Scenario document (TOML). Without it a scenario is generated from --seed.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock level cap.
    #[arg(long, global = true)]
    levels: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group structure: lengths, cosets, Euler-Solomon, Poincare polynomial.
    Coxeter,
    /// Positivity of P(W) and complete positivity of a quasi-multiplicative map.
    Positivity,
    /// Positivity of the block-length kernel.
    Blocklength,
    /// Fock space identities and norm bounds.
    Fock,
    /// Pairing moments against matrix moments, and traciality.
    Wick,
    /// Sandwich inequality and tensor-square norm.
    Opspace,
    /// Emit a random scenario document.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// One of coxeter, positivity, blocklength, fock, wick, opspace.
    kind: String,
    #[arg(long)]
    d: Option<usize>,
    /// Largest |q_ij| of the generated deformation.
    #[arg(long)]
    bound: Option<f64>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    aux_dim: Option<usize>,
}

fn command_kind(c: &Command) -> Option<Kind> {
    match c {
        Command::Coxeter => Some(Kind::Coxeter),
        Command::Positivity => Some(Kind::Positivity),
        Command::Blocklength => Some(Kind::Blocklength),
        Command::Fock => Some(Kind::Fock),
        Command::Wick => Some(Kind::Wick),
        Command::Opspace => Some(Kind::Opspace),
        Command::Gen(_) => None,
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load(cli: &Cli, kind: Kind) -> Result<ScenarioSpec, Error> {
    let mut spec = match &cli.spec {
        Some(path) => shell::parse_spec(path)?,
        None => shell::gen_random(kind, cli.seed.unwrap_or(0), &GenParams::default())?,
    };
    if spec.kind != kind {
        return Err(Error::InvalidScenario(format!(
            "scenario kind {} does not match subcommand {kind}",
            spec.kind
        )));
    }
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(levels) = cli.levels {
        spec.levels = levels;
    }
    spec.validate()?;
    Ok(spec)
}

fn real_main(cli: &Cli) -> Result<i32, Error> {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Structured => Format::Structured,
    };
    match &cli.command {
        Command::Gen(g) => {
            let kind: Kind = g.kind.parse()?;
            let params = GenParams {
                d: g.d,
                bound: g.bound,
                levels: cli.levels,
                rank: g.rank,
                m: g.m,
                trials: g.trials,
                aux_dim: g.aux_dim,
            };
            let spec = shell::gen_random(kind, cli.seed.unwrap_or(0), &params)?;
            emit(cli, &spec.to_toml()?)?;
            Ok(0)
        }
        other => {
            let kind = command_kind(other).expect("scenario subcommand");
            let spec = load(cli, kind)?;
            let report = shell::run(&spec);
            emit(cli, &report.render(format)?)?;
            Ok(shell::exit_code(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("coxfock: error [{}]: {e}", e.code());
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
