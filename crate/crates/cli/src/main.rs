use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qnlcc_cli::{list_targets, run, CliError, CliResult, ExperimentConfig, Mode, Report, REPORT_SCHEMA};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "qnlcc", version, about = "Run non-locality and communication-complexity experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// List targets and their parameters.
    List {
        /// Print the full catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Detection-efficiency experiments.
    Detect {
        #[command(subcommand)]
        what: DetectCommand,
    },
    /// Lower-bound tooling.
    Lb {
        #[arg(value_enum)]
        tool: LbTool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate a circuit with PR boxes.
    Vandam {
        /// Fixture name or a path to a circuit JSON file.
        #[arg(long, default_value = "single-and")]
        circuit: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Print the report JSON schema.
    Schema,
}

#[derive(Subcommand)]
enum DetectCommand {
    /// Critical efficiency of the quantum CHSH correlations.
    Threshold {
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LbTool {
    Rank,
    Discrepancy,
    Lindsey,
    Nayak,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Target parameter as `name=value`; the value is parsed as JSON when possible.
    #[arg(long = "set", value_name = "NAME=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with code 3 when any check fails.
    #[arg(long)]
    check: bool,
}

impl OutputArgs {
    fn apply(&self, mut cfg: ExperimentConfig) -> CliResult<ExperimentConfig> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if self.trials.is_some() {
            cfg.trials = self.trials;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.check |= self.check;
        cfg.record_trials |= matches!(self.format, Format::Csv);
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::invalid("--set", format!("`{kv}` is not NAME=VALUE")))?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            cfg.params.insert(k.to_string(), value);
        }
        Ok(cfg)
    }
}

fn emit(report: &Report, format: Format) -> CliResult<()> {
    let sink: Box<dyn Write> = match &report.config.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = sink;
    match format {
        Format::Json => writeln!(sink, "{}", report.to_json()?)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn execute(cfg: ExperimentConfig, out: &OutputArgs) -> CliResult<ExitCode> {
    let cfg = out.apply(cfg)?;
    let report = run(&cfg)?;
    emit(&report, out.format)?;
    if cfg.check && !report.passed() {
        for c in report.failed_checks() {
            eprintln!("check failed: {} ({})", c.name, c.detail);
        }
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Run { config, out } => execute(ExperimentConfig::load(&config)?, &out),
        Command::List { json } => {
            let targets = list_targets();
            if json {
                println!("{}", serde_json::to_string_pretty(&targets)?);
            } else {
                for t in targets {
                    let params: Vec<&str> = t.params.iter().map(|p| p.name).collect();
                    println!("{:<18} {}  [{}]", t.name, t.summary, params.join(", "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Detect {
            what: DetectCommand::Threshold { tol, out },
        } => execute(ExperimentConfig::new("detect-threshold").param("tol", tol), &out),
        Command::Lb { tool, out } => {
            let target = match tool {
                LbTool::Rank => "lb-rank",
                LbTool::Discrepancy => "lb-discrepancy",
                LbTool::Lindsey => "lb-lindsey",
                LbTool::Nayak => "lb-nayak",
            };
            execute(ExperimentConfig::new(target), &out)
        }
        Command::Vandam { circuit, p, mode, out } => {
            let circuit = if std::path::Path::new(&circuit).is_file() {
                serde_json::from_str::<Value>(&std::fs::read_to_string(&circuit)?)?
            } else {
                Value::String(circuit)
            };
            let mode = match mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Sampled => Mode::Sampled,
            };
            execute(ExperimentConfig::new("vandam").mode(mode).param("circuit", circuit).param("p", p), &out)
        }
        Command::Schema => {
            println!("{REPORT_SCHEMA}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
