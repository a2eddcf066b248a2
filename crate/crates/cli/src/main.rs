use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lechkit_cli::commands::{self, EnvCaps, Output, VerifyArgs};

#[derive(Parser)]
#[command(name = "lechkit", version, about = "Multiplicities of local rings and flat local maps over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced Groebner basis of a ring's defining ideal or of a declared ideal
    Gb { file: String, ideal: String },
    /// Local length of R/I at the origin
    Length { file: String, ring: String, ideal: String },
    /// Hilbert-Samuel multiplicity and length table
    Mult {
        file: String,
        ring: String,
        #[arg(long)]
        ideal: Option<String>,
    },
    /// Hilbert-Kunz estimates l(R/I^[p^e]) / p^(e d)
    Hk {
        file: String,
        ring: String,
        #[arg(long, default_value = "m")]
        ideal: String,
        #[arg(long, default_value_t = 2)]
        emax: u32,
    },
    /// Cohen factorization of a map
    Cohen {
        file: String,
        map: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the checks declared in a fixture file
    Verify {
        file: String,
        #[command(flatten)]
        run: RunFlags,
    },
    /// The shipped fixture corpus
    Fixtures {
        #[command(subcommand)]
        action: FixturesAction,
    },
    /// Reduce a map's integer presentation modulo primes
    Specialize {
        file: String,
        map: String,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 5, 7])]
        primes: Vec<u32>,
    },
}

#[derive(clap::Args)]
struct RunFlags {
    /// Comma-separated check ids to run
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frobenius exponent bound for every check
    #[arg(long)]
    emax: Option<u32>,
    /// Largest power t tried for Hilbert-Samuel functions
    #[arg(long)]
    tmax: Option<u32>,
    /// Write the run report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

impl RunFlags {
    fn args(&self) -> VerifyArgs<'_> {
        VerifyArgs {
            checks: self.checks.clone(),
            seed: self.seed,
            emax: self.emax,
            tmax: self.tmax,
            json: self.json.as_deref(),
            jobs: self.jobs,
        }
    }
}

#[derive(Subcommand)]
enum FixturesAction {
    List,
    RunAll {
        #[command(flatten)]
        run: RunFlags,
    },
}

fn dispatch(cli: Cli, caps: &EnvCaps) -> Output {
    match cli.command {
        Command::Gb { file, ideal } => commands::gb(&file, &ideal, caps),
        Command::Length { file, ring, ideal } => commands::length(&file, &ring, &ideal, caps),
        Command::Mult { file, ring, ideal } => commands::mult(&file, &ring, ideal.as_deref(), caps),
        Command::Hk { file, ring, ideal, emax } => commands::hk(&file, &ring, &ideal, emax, caps),
        Command::Cohen { file, map, seed } => commands::cohen(&file, &map, seed, caps),
        Command::Verify { file, run } => commands::verify(&file, &run.args(), caps),
        Command::Fixtures { action: FixturesAction::List } => commands::fixtures_list(),
        Command::Fixtures { action: FixturesAction::RunAll { run } } => {
            commands::fixtures_run_all(&run.args(), caps)
        }
        Command::Specialize { file, map, primes } => commands::specialize(&file, &map, &primes, caps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_ERROR as u8 } else { 0 });
        }
    };
    let out = match EnvCaps::from_env() {
        Ok(caps) => dispatch(cli, &caps),
        Err(e) => Output::error(e),
    };
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
