//! `hallmhd`: run, resume, verify and inspect Hall MHD configurations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hallmhd::config::RunSpec;
use hallmhd::runner::{cmd_constants, cmd_resume, cmd_run, Report};
use hallmhd::verify::suite;
use hallmhd::Error;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "HALLMHD_THREADS";

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hallmhd",
    version,
    about = "Pseudo-spectral Hall MHD simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration from its scenario's initial data.
    Run(ConfigArgs),
    /// Continue a run from its checkpoint, appending to the CSV.
    Resume {
        #[command(flatten)]
        config: ConfigArgs,
        /// Checkpoint to resume from (default: [checkpoint] path).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Verify {
        /// `acceptance`, `quick`, or a single criterion id such as A3.
        #[arg(default_value = "acceptance")]
        suite: String,
    },
    /// Print the constants and predicates of the initial data.
    Constants(ConfigArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    config: PathBuf,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    hall: Option<f64>,
    /// "if_rk4" or "if_rk2".
    #[arg(long)]
    scheme: Option<String>,
    /// A step size or "auto".
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    diag_interval: Option<f64>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<i64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Any other field, as `section.key=value` with a TOML value.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    sets: Vec<String>,
}

fn set(table: &mut toml::Table, section: &str, key: &str, value: toml::Value) {
    let entry = table
        .entry(section)
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    if let toml::Value::Table(t) = entry {
        t.insert(key.to_string(), value);
    }
}

fn parse_value(text: &str) -> toml::Value {
    match format!("v = {text}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(text.to_string()),
    }
}

impl ConfigArgs {
    fn load(&self) -> Result<RunSpec, Error> {
        let text = std::fs::read_to_string(&self.config)?;
        if text.trim().is_empty() {
            return Err(Error::Config(format!("{} is empty", self.config.display())));
        }
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", self.config.display())))?;
        use toml::Value as V;
        let named: [(&str, &str, Option<V>); 12] = [
            ("model", "tag", self.model.clone().map(V::String)),
            ("grid", "n", self.n.map(V::Integer)),
            ("physics", "nu", self.nu.map(V::Float)),
            ("physics", "eta", self.eta.map(V::Float)),
            ("physics", "hall", self.hall.map(V::Float)),
            ("stepper", "scheme", self.scheme.clone().map(V::String)),
            ("stepper", "dt", self.dt.as_deref().map(parse_value)),
            ("stepper", "t_end", self.t_end.map(V::Float)),
            ("stepper", "diag_interval", self.diag_interval.map(V::Float)),
            ("scenario", "name", self.scenario.clone().map(V::String)),
            ("scenario", "seed", self.seed.map(V::Integer)),
            (
                "output",
                "dir",
                self.out_dir
                    .as_ref()
                    .map(|p| V::String(p.display().to_string())),
            ),
        ];
        for (section, key, value) in named {
            if let Some(v) = value {
                set(&mut table, section, key, v);
            }
        }
        for s in &self.sets {
            let (path, value) = s.split_once('=').ok_or_else(|| {
                Error::Config(format!("--set expects SECTION.KEY=VALUE, got {s}"))
            })?;
            let (section, key) = path.trim().split_once('.').ok_or_else(|| {
                Error::Config(format!("--set expects SECTION.KEY=VALUE, got {s}"))
            })?;
            set(&mut table, section, key, parse_value(value.trim()));
        }
        let merged = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        RunSpec::from_toml_str(&merged).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", self.config.display())),
            other => other,
        })
    }
}

fn print_report(r: &Report) {
    print!("{}", r.render());
}

fn fail(e: Error) -> ExitCode {
    match &e {
        Error::BlowUp { failure_path, .. } => {
            eprintln!("error: {e}");
            if let Some(p) = failure_path {
                eprintln!("failure record: {}", p.display());
            }
            ExitCode::from(EXIT_BLOW_UP)
        }
        Error::Config(_) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        _ => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}

fn finish_run(summary: Result<hallmhd::runner::RunSummary, Error>) -> ExitCode {
    match summary {
        Ok(s) => {
            print_report(&s.report);
            println!("csv = {}", s.csv_path.display());
            println!("summary = {}", s.summary_path.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn verify(name: &str) -> ExitCode {
    let criteria = match suite(name) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let mut failed = 0;
    for c in criteria {
        let outcome = c.run();
        println!("{}", outcome.line());
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{failed} criteria failed");
        ExitCode::from(EXIT_FAILED)
    }
}

fn init_threads() -> Result<(), Error> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = text.trim().parse().map_err(|_| {
        Error::Config(format!(
            "{THREADS_ENV} must be a thread count, got {text:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(e);
    }
    match &cli.command {
        Command::Run(c) => match c.load() {
            Ok(spec) => finish_run(cmd_run(&spec)),
            Err(e) => fail(e),
        },
        Command::Resume { config, checkpoint } => match config.load() {
            Ok(spec) => finish_run(cmd_resume(&spec, checkpoint.as_deref())),
            Err(e) => fail(e),
        },
        Command::Verify { suite } => verify(suite),
        Command::Constants(c) => match c.load().and_then(|s| cmd_constants(&s)) {
            Ok(r) => {
                print_report(&r);
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
    }
}
