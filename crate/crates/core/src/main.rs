use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nuframe::harness::{self, ConfigFile, ExperimentConfig, Exit, Format, HarnessError, Outcome, Overrides};

#[derive(Parser)]
#[command(name = "nuframe", version, about = "Frame bounds and oracle checks for nonuniform wavelet systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check (N, r) and print samples of the translation set and Ω
    Validate {
        #[arg(short = 'N')]
        n: i64,
        #[arg(short = 'r')]
        r: i64,
    },
    /// Compute frame bounds for the selected theorems
    Bounds(Common),
    /// Run the oracle on seeded random test functions against the bounds
    Verify {
        #[command(flatten)]
        common: Common,
        /// JSON bounds file from `bounds --format json` used instead of recomputing
        #[arg(long)]
        bounds: Option<PathBuf>,
    },
    /// Compute all bounds and check the baseline ordering
    Compare(Common),
    /// List the built-in wavelets
    Catalog {
        #[arg(short = 'N', default_value_t = 1)]
        n: i64,
        #[arg(short = 'r', default_value_t = 1)]
        r: i64,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short = 'N')]
    n: Option<i64>,
    #[arg(short = 'r')]
    r: Option<i64>,
    /// Catalog name or path to a JSON profile literal
    #[arg(long)]
    wavelet: Option<String>,
    /// Comma-separated subset of t23,t24,t26,baseline
    #[arg(long)]
    theorems: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    pieces: Option<usize>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(self) -> Result<ExperimentConfig, HarnessError> {
        let file = match &self.config {
            Some(p) => ConfigFile::read(p)?,
            None => ConfigFile::default(),
        };
        let o = Overrides {
            n: self.n,
            r: self.r,
            wavelet: self.wavelet,
            theorems: self.theorems,
            seed: self.seed,
            count: self.count,
            pieces: self.pieces,
            format: self.format,
            out: self.out,
        };
        ExperimentConfig::build(file, o)
    }
}

fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> Result<(), HarnessError> {
    match out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| HarnessError { exit: Exit::Internal, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            print!("{}", outcome.text);
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Exit, HarnessError> {
    let (outcome, out) = match cli.command {
        Command::Validate { n, r } => (harness::validate(n, r)?, None),
        Command::Bounds(c) => {
            let cfg = c.config()?;
            (harness::bounds(&cfg)?, cfg.output.path)
        }
        Command::Verify { common, bounds } => {
            let cfg = common.config()?;
            (harness::verify(&cfg, bounds.as_deref())?, cfg.output.path)
        }
        Command::Compare(c) => {
            let cfg = c.config()?;
            (harness::compare(&cfg)?, cfg.output.path)
        }
        Command::Catalog { n, r, format, out } => {
            let params = harness::resolve_params(Some(n), Some(r))?;
            (harness::catalog_listing(&params, Format::parse(&format)?)?, out)
        }
    };
    emit(&outcome, out.as_ref())?;
    if outcome.exit == Exit::NotCertified {
        eprintln!("not certified as a frame by the selected criteria");
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NUFRAME_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Config.code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let exit = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit
    });
    ExitCode::from(exit.code() as u8)
}
