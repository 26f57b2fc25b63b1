use std::process::ExitCode;

use c2alg_cli::job::{load_text, parse_job, run, Command, Format, JobError, JobSpec, Kind, Options};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "c2alg", version, about = "Exact C2-equivariant algebra: Mackey functors, Tambara data, real trace invariants")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "pretty")]
    format: FormatArg,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Pretty,
    Json,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Trivial,
    Free,
}

#[derive(Args)]
struct Trunc {
    /// Weight truncation; overrides MACKEY_TRUNC (default 8).
    #[arg(long)]
    trunc: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a Mackey functor as a Lewis diagram.
    MackeyShow {
        #[arg(long)]
        functor: String,
    },
    /// Box product of two Mackey functors.
    Box {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Geometric fixed points of a functor, or of a complex levelwise.
    Phi {
        #[arg(long, conflicts_with = "complex", required_unless_present = "complex")]
        functor: Option<String>,
        #[arg(long)]
        complex: Option<String>,
    },
    /// Regular-slice connectivity checks.
    SliceCheck {
        #[arg(long)]
        complex: String,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// Free involutive Tambara algebra on one generator.
    TambaraFree {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        base: Option<String>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Involutive cotangent module.
    Cotangent {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        weight_max: Option<u32>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Involutive de Rham cohomology per weight.
    Derham {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long)]
        weight_max: Option<u32>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Graded pieces of real Hochschild homology.
    HrGr {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        weight_max: Option<u32>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Hochschild homology with its eigen-splitting.
    Hh {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        nmax: Option<usize>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Cyclic and dihedral homology.
    Dihedral {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        nmax: Option<usize>,
        #[command(flatten)]
        trunc: Trunc,
    },
    /// Run a JSON job specification (path or inline).
    Job { spec: String },
}

fn source(s: &str) -> Result<Value, JobError> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| JobError::Parse(format!("inline JSON: {}", e)))
    } else {
        Ok(Value::String(s.to_string()))
    }
}

fn build(cli: Cli) -> Result<JobSpec, JobError> {
    let mut o = Options {
        format: Some(match cli.format {
            FormatArg::Pretty => Format::Pretty,
            FormatArg::Json => Format::Json,
        }),
        ..Options::default()
    };
    let (command, input) = match cli.command {
        Cmd::MackeyShow { functor } => (Command::MackeyShow, Some(source(&functor)?)),
        Cmd::Box { left, right } => {
            o.right = Some(source(&right)?);
            (Command::Box, Some(source(&left)?))
        }
        Cmd::Phi { functor, complex } => {
            let s = functor.or(complex).expect("clap enforces one");
            (Command::Phi, Some(source(&s)?))
        }
        Cmd::SliceCheck { complex, n } => {
            o.n = Some(n);
            (Command::SliceCheck, Some(source(&complex)?))
        }
        Cmd::TambaraFree { kind, base, trunc } => {
            o.kind = Some(match kind {
                KindArg::Trivial => Kind::Trivial,
                KindArg::Free => Kind::Free,
            });
            o.base = base;
            o.trunc = trunc.trunc;
            (Command::TambaraFree, None)
        }
        Cmd::Cotangent { algebra, weight_max, trunc } => {
            o.weight_max = weight_max;
            o.trunc = trunc.trunc;
            (Command::Cotangent, Some(source(&algebra)?))
        }
        Cmd::Derham { algebra, imax, weight_max, trunc } => {
            o.imax = imax;
            o.weight_max = weight_max;
            o.trunc = trunc.trunc;
            (Command::Derham, Some(source(&algebra)?))
        }
        Cmd::HrGr { algebra, i, weight_max, trunc } => {
            o.i = Some(i);
            o.weight_max = weight_max;
            o.trunc = trunc.trunc;
            (Command::HrGr, Some(source(&algebra)?))
        }
        Cmd::Hh { algebra, nmax, trunc } => {
            o.nmax = nmax;
            o.trunc = trunc.trunc;
            (Command::Hh, Some(source(&algebra)?))
        }
        Cmd::Dihedral { algebra, nmax, trunc } => {
            o.nmax = nmax;
            o.trunc = trunc.trunc;
            (Command::Dihedral, Some(source(&algebra)?))
        }
        Cmd::Job { spec } => {
            let mut job = parse_job(&load_text(&spec)?)?;
            if job.options.format.is_none() {
                job.options.format = o.format;
            }
            return Ok(job);
        }
    };
    Ok(JobSpec { command, input, options: o })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = std::env::var("MACKEY_TRUNC").ok();
    match build(cli).and_then(|job| run(&job, env.as_deref())) {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
