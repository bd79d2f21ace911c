use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmtrace::verify::{self, Check, DualityInstance, OutputFormat, RunConfig};
use cmtrace::Error;

#[derive(Parser, Debug)]
#[command(
    name = "verify",
    version,
    about = "Check twisted trace identities against exact q-series"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Opts {
    /// Working precision in bits (default: 256 for eta25, 128 otherwise)
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Relative tolerance (absolute when the exact side is 0)
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Fixed bound on the Poincaré series row sum instead of the adaptive one
    #[arg(long, global = true)]
    c_max: Option<i64>,
    /// Trace cache file
    #[arg(long, global = true, env = "CMTRACE_CACHE")]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report wall_ms as 0 so output is byte-reproducible
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Instance {
    #[value(name = "mock_theta", alias = "mock-theta")]
    MockTheta,
    Eta25,
    Empty,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Coefficient of the third order mock theta function f(q)
    MockTheta {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Coefficient of 1/η(z)^25
    Eta25 {
        #[arg(long)]
        n: u32,
    },
    /// Traces of singular moduli of j - 744
    Zagier {
        #[arg(long)]
        d: i64,
    },
    /// Duality between traces and principal parts of the lift
    Duality {
        #[arg(long, value_enum)]
        instance: Instance,
    },
    /// Integrality of an untwisted level 6 trace
    Integrality {
        #[arg(long)]
        d: i64,
        #[arg(long, default_value_t = 1)]
        h: i64,
    },
    /// The full standard battery
    All,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            prec_bits: self.prec,
            tolerance: self.tolerance,
            c_max: self.c_max,
            cache_path: self.cache.clone(),
            format: match self.format {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
                Format::Text => OutputFormat::Text,
            },
            threads: self.threads,
            timing: !self.no_timing,
        }
    }
}

fn checks(cmd: &Cmd) -> Vec<Check> {
    match *cmd {
        Cmd::MockTheta { delta } => vec![Check::MockTheta(delta)],
        Cmd::Eta25 { n } => vec![Check::Eta25(n)],
        Cmd::Zagier { d } => vec![Check::Zagier(d)],
        Cmd::Duality { instance } => vec![Check::Duality(match instance {
            Instance::MockTheta => DualityInstance::MockTheta,
            Instance::Eta25 => DualityInstance::Eta25,
            Instance::Empty => DualityInstance::Empty,
        })],
        Cmd::Integrality { d, h } => vec![Check::Integrality(d, h)],
        Cmd::All => verify::standard_battery(),
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInput(_) | Error::InvalidDiscriminant(..) | Error::Io(_) | Error::Json(_)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = cli.opts.config();
    let reports = match verify::run_checks(&checks(&cli.cmd), &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    match verify::render(&reports, cfg.format) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
