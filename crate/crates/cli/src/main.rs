use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tumorlevy::{EscapeTarget, Scheme};
use tumorlevy_cli::commands::{self, write_file, Quantity, SweepParam, SweepSpec};
use tumorlevy_cli::config::{DriftKind, OutputFormat, Overrides, Resolved, RunConfig};
use tumorlevy_cli::validate::{cmd_validate, Fault, ValidateOptions};
use tumorlevy_cli::{CliError, CliResult, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "tumorlevy", version, about = "Mean exit times and escape probabilities under Brownian plus stable Levy noise")]
struct Cli {
    /// Worker threads (also TUMORLEVY_WORKERS); defaults to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean exit time u(x) on the grid, as CSV.
    Met(Shared),
    /// Escape probability p(x) into the target side, as CSV.
    Escape(Shared),
    /// Monte Carlo estimate at x0 against the solver.
    Mc {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_enum, default_value_t = QuantityArg::Met)]
        quantity: QuantityArg,
    },
    /// One curve per value of a noise parameter (or one row per x0).
    Sweep {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_enum, default_value_t = QuantityArg::Met)]
        quantity: QuantityArg,
        /// a | epsilon | alpha | x0
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// All panels of a figure preset (fig2 .. fig11) into a directory.
    Figure {
        preset: String,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run the self-check suite.
    Validate {
        #[arg(long)]
        skip_slow: bool,
        /// Only checks whose name contains this (repeatable).
        #[arg(long)]
        only: Vec<String>,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Met,
    Escape,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Corrected,
    Uncorrected,
}

#[derive(Clone, Copy, ValueEnum)]
enum DriftArg {
    Tumor,
    Zero,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

#[derive(Args)]
struct Shared {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    drift: Option<DriftArg>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    /// Output file (directory for `figure`); stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, value_enum, default_value_t = TargetArg::Left)]
    target: TargetArg,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
}

impl Shared {
    fn resolve(&self) -> CliResult<Resolved> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(&Overrides {
            drift: self.drift.map(|d| match d {
                DriftArg::Tumor => DriftKind::Tumor,
                DriftArg::Zero => DriftKind::Zero,
            }),
            theta: self.theta,
            beta: self.beta,
            a: self.a,
            eps: self.eps,
            alpha: self.alpha,
            c: self.c,
            d: self.d,
            h: self.h,
            out: self.out.clone(),
            seed: self.seed,
            dt: self.dt,
            paths: self.paths,
            max_time: self.max_time,
            x0: self.x0,
            scheme: self.scheme.map(|s| match s {
                SchemeArg::Corrected => Scheme::Corrected,
                SchemeArg::Uncorrected => Scheme::Uncorrected,
            }),
        });
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Svg => OutputFormat::Svg,
            };
        }
        cfg.resolve()
    }

    fn target(&self) -> EscapeTarget {
        match self.target {
            TargetArg::Left => EscapeTarget::LeftExtinction,
            TargetArg::Right => EscapeTarget::RightMalignant,
        }
    }

    fn quantity(&self, q: QuantityArg) -> Quantity {
        match q {
            QuantityArg::Met => Quantity::MeanExitTime,
            QuantityArg::Escape => Quantity::Escape(self.target()),
        }
    }
}

fn emit(r: &Resolved, text: &str) -> CliResult<()> {
    match &r.config.output.path {
        Some(p) => write_file(Path::new(p), text),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// CSV to `--out`, plus an SVG beside it when the format asks for one.
fn emit_field(r: &Resolved, csv: &str, q: Quantity) -> CliResult<()> {
    emit(r, csv)?;
    if r.config.output.format == OutputFormat::Svg {
        let path = r
            .config
            .output
            .path
            .as_ref()
            .ok_or_else(|| CliError::Config("svg output needs --out".into()))?;
        write_file(&Path::new(path).with_extension("svg"), &commands::field_svg(r, q)?)?;
    }
    Ok(())
}

fn configure_workers(flag: Option<usize>) -> CliResult<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.parse()
                    .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    configure_workers(cli.workers)?;
    match cli.command {
        Command::Met(s) => {
            let r = s.resolve()?;
            emit_field(&r, &commands::cmd_met(&r)?, Quantity::MeanExitTime)
        }
        Command::Escape(s) => {
            let r = s.resolve()?;
            let t = s.target();
            emit_field(&r, &commands::cmd_escape(&r, t)?, Quantity::Escape(t))
        }
        Command::Mc { shared, quantity } => {
            let r = shared.resolve()?;
            emit(&r, &commands::cmd_mc(&r, shared.quantity(quantity))?)
        }
        Command::Sweep {
            shared,
            quantity,
            param,
            values,
        } => {
            let r = shared.resolve()?;
            let out = commands::cmd_sweep(&r, &SweepSpec { param, values }, shared.quantity(quantity))?;
            emit(&r, &out.csv)?;
            out.failure.map_or(Ok(()), Err)
        }
        Command::Figure { preset, shared } => {
            let r = shared.resolve()?;
            let dir = PathBuf::from(r.config.output.path.clone().unwrap_or_else(|| preset.clone()));
            let svg = r.config.output.format == OutputFormat::Svg;
            let out = commands::cmd_figure(&preset, &r, svg)?;
            for (name, text) in &out.files {
                write_file(&dir.join(name), text)?;
            }
            log::info!("wrote {} files to {}", out.files.len(), dir.display());
            out.failure.map_or(Ok(()), Err)
        }
        Command::Validate {
            skip_slow,
            only,
            inject_fault,
        } => {
            let (report, status) = cmd_validate(&ValidateOptions {
                skip_slow,
                only,
                fault: inject_fault,
            });
            print!("{report}");
            status
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
