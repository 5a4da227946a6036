use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod jobs;

use jobs::{CliError, Job};

/// Exact Witt and Cohen ring arithmetic with JSON input and output.
///
/// The payload is read from `--input` or, when absent, from standard input.
#[derive(Parser, Debug)]
#[command(name = "cohen", version)]
struct Cli {
    #[command(flatten)]
    field: FieldArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Characteristic.
    #[arg(long, global = true, default_value_t = 2)]
    pub p: u32,
    /// Degree of the constant field over F_p.
    #[arg(long, global = true, default_value_t = 1)]
    pub d: usize,
    /// Constant-field modulus, low to high coefficients, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
    /// Number of transcendental variables.
    #[arg(long, global = true, default_value_t = 1)]
    pub r: usize,
    /// Length (level, or valued precision).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 50)]
    pub samples: usize,
    /// JSON payload; standard input is read when omitted.
    #[arg(long, global = true)]
    pub input: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// λ-decomposition of `alpha` at level m.
    Lambda,
    #[command(subcommand)]
    Witt(WittOp),
    #[command(subcommand)]
    Cohen(CohenOp),
    #[command(subcommand)]
    Morphism(MorphismOp),
    #[command(subcommand)]
    Valued(ValuedOp),
    #[command(subcommand)]
    Lang(LangOp),
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum WittOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Frobenius,
    Verschiebung,
    DivByP,
    Teichmuller,
    Truncate,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum CohenOp {
    Digitize,
    Undigitize,
    Member,
    /// λ-representative of `alpha`.
    Rep,
    /// Multiplicative representative of a perfect-core element.
    MultRep,
    /// Checks the truncation tower on the given `alpha` samples.
    Tower,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum MorphismOp {
    StructureIso,
    Tep,
    CheckEnrichment,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum ValuedOp {
    V,
    Res,
    Ac,
    Arith,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum LangOp {
    Eval,
    Audit,
}

fn read_payload(args: &FieldArgs) -> Result<serde_json::Value, CliError> {
    let text = match &args.input {
        Some(s) => s.clone(),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Schema(format!("cannot read standard input: {e}")))?;
            buf
        }
    };
    if text.trim().is_empty() {
        return Ok(serde_json::json!({}));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("invalid JSON: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let job = match cli.command {
        Command::Lambda => Job::Lambda,
        Command::Witt(op) => Job::Witt(op),
        Command::Cohen(op) => Job::Cohen(op),
        Command::Morphism(op) => Job::Morphism(op),
        Command::Valued(op) => Job::Valued(op),
        Command::Lang(op) => Job::Lang(op),
    };
    let outcome = read_payload(&cli.field).and_then(|payload| jobs::run(&job, &cli.field, &payload));
    match outcome {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Schema(msg)) => {
            eprintln!("schema error: {msg}");
            ExitCode::from(64)
        }
        Err(CliError::Core(e)) => {
            println!("{}", serde_json::json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(if e.is_marker() { 2 } else { 1 })
        }
    }
}
