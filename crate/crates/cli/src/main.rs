use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use troplag_core::error::Error;
use troplag_core::io::{emit, parse_rational_str};
use troplag_core::multiplicity::DEFAULT_KAPPA_CAP;
use troplag_core::workbench::{exit_code, run, Command, Inputs, Options};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Validate,
    Multiplicity,
    H1,
    Surface,
    Pieces,
    Lens,
    Enumerate,
    Wavefront,
    Suitability,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Multiplicity => Command::Multiplicity,
            Cmd::H1 => Command::H1,
            Cmd::Surface => Command::Surface,
            Cmd::Pieces => Command::Pieces,
            Cmd::Lens => Command::Lens,
            Cmd::Enumerate => Command::Enumerate,
            Cmd::Wavefront => Command::Wavefront,
            Cmd::Suitability => Command::Suitability,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

/// Exact computations on tropical curves in Delzant domains.
#[derive(Parser, Debug)]
#[command(name = "troplag", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Curve JSON file.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Domain JSON file.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Line configuration JSON file.
    #[arg(long)]
    lines: Option<PathBuf>,
    /// Toric degree JSON file for `enumerate`.
    #[arg(long)]
    degree: Option<PathBuf>,
    /// Root of the mixed h-product: a vertex id or `leaf:N`.
    #[arg(long)]
    root: Option<String>,
    /// Allow edges of weight > 1 away from the boundary.
    #[arg(long)]
    relaxed: bool,
    /// Wave front offset, `p/q`.
    #[arg(long)]
    delta: Option<String>,
    /// Largest number of leaves `enumerate` accepts.
    #[arg(long, default_value_t = DEFAULT_KAPPA_CAP)]
    kappa_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn table(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                table(x, &format!("{prefix}/{k}"), out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                table(x, &format!("{prefix}/{i}"), out);
            }
        }
        _ => {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("{:<40} {text}\n", if prefix.is_empty() { "/" } else { prefix }));
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => emit(v),
        Format::Table => {
            let mut s = String::new();
            table(v, "", &mut s);
            s
        }
    }
}

fn execute(cli: &Cli) -> Result<troplag_core::workbench::Outcome, Error> {
    let inputs = Inputs::load(cli.curve.as_deref(), cli.domain.as_deref(), cli.lines.as_deref(), cli.degree.as_deref())?;
    let delta = match &cli.delta {
        Some(s) => Some(parse_rational_str(s).ok_or_else(|| Error::InvalidInput(format!("--delta {s} is not p/q")))?),
        None => None,
    };
    let opts = Options { root: cli.root.clone(), relaxed: cli.relaxed, delta, kappa_cap: cli.kappa_cap };
    run(cli.command.into(), &inputs, &opts)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli);
    let code = exit_code(&result);
    match result {
        Ok(o) => print!("{}", render(&o.report, cli.format)),
        Err(e) => {
            let mut err = json!({"code": e.code(), "message": e.to_string()});
            match &e {
                Error::Parse { path, line, column, .. } => {
                    err["path"] = json!(path);
                    err["line"] = json!(line);
                    err["column"] = json!(column);
                }
                Error::Schema { pointer, .. } => err["pointer"] = json!(pointer),
                _ => {}
            }
            print!("{}", render(&json!({ "error": err }), cli.format));
            eprintln!("error[{}]: {e}", e.code());
        }
    }
    ExitCode::from(code as u8)
}
