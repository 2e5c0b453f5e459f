use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "piforge", version, about = "Connectivity, Poincaré and thickening certificates for finite metric measure spaces")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Generator spec (`path:5`, `grid:4,2`, `fat_cantor:3`, ...) or a space file (`file:PATH` or `*.json`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// JSON file whose keys mirror the flags; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Obstacle games for (C, δ, ε)-connectivity over pairs of vertices.
    Certify(commands::CertifyArgs),
    /// Fine connectivity exponent α from a τ grid.
    Alpha(commands::AlphaArgs),
    /// Gap filling with an empty obstacle, checking the length bound.
    Quasiconvex(commands::QuasiconvexArgs),
    /// Empirical (1,p)-Poincaré constant.
    Poincare(commands::PoincareArgs),
    /// p-modulus of the curves joining two vertices.
    Modulus(commands::ModulusArgs),
    /// A∞ check for a radial power weight.
    Ainfty(commands::AinftyArgs),
    /// Thickening of K inside A, with estimates and glued-space certificates.
    Thicken(commands::ThickenArgs),
    /// Predicted constants from (D, C, δ, ε, p).
    Constants(commands::ConstantsArgs),
    /// Brute-force cross-checks of the fragment search and exact adversary.
    Oracle(commands::OracleArgs),
}

const SUBCOMMANDS: [&str; 9] = [
    "certify",
    "alpha",
    "quasiconvex",
    "poincare",
    "modulus",
    "ainfty",
    "thicken",
    "constants",
    "oracle",
];

/// Splices the flags of a `--config` file in front of the command-line flags
/// so the latter override them. A config may name the subcommand through
/// its `operation` key.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::new();
    let mut config = None;
    let mut it = argv.into_iter();
    let prog = it.next().unwrap_or_else(|| "piforge".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path}: expected a JSON object"));
    };
    let mut op = None;
    let mut flags = Vec::new();
    for (key, v) in map {
        if key == "operation" {
            op = Some(v.as_str().ok_or("config: `operation` must be a string")?.to_string());
            continue;
        }
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect::<Result<_, _>>()?;
                flags.push(flag);
                flags.push(parts.join(","));
            }
            other => {
                flags.push(flag);
                flags.push(scalar(&other)?);
            }
        }
    }
    let (sub, tail) = match rest.first() {
        Some(s) if SUBCOMMANDS.contains(&s.as_str()) => (s.clone(), rest[1..].to_vec()),
        _ => match op {
            Some(o) => (o, rest),
            None => return Err("no subcommand given on the command line or as `operation` in the config".into()),
        },
    };
    let mut out = vec![prog, sub];
    out.extend(flags);
    out.extend(tail);
    Ok(out)
}

fn scalar(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(format!("config: unsupported value {other}")),
    }
}

fn main() -> ExitCode {
    piforge::init_threads();
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Certify(a) => commands::certify(a),
        Command::Alpha(a) => commands::alpha(a),
        Command::Quasiconvex(a) => commands::quasiconvex(a),
        Command::Poincare(a) => commands::poincare(a),
        Command::Modulus(a) => commands::modulus(a),
        Command::Ainfty(a) => commands::ainfty(a),
        Command::Thicken(a) => commands::thicken(a),
        Command::Constants(a) => commands::constants(a),
        Command::Oracle(a) => commands::oracle(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
