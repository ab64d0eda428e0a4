//! The `fatk` command line: batch checking, normalization, validity and
//! enumeration over files of one job per line.

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fatk_core::encodings::{expand_str, parse_sugared_sequent, parse_sugared_term};
use fatk_core::reduction::{normalize, Fuel, TraceStatus};
use fatk_core::semantics::{
    enumerate_normal, extract, is_valid, parse_witnesses, AtomicBase, ExtractError, Flavor, Status,
    WitnessBudget,
};
use fatk_core::syntax::{parse_goal, parse_open_term, Atom, Formula};
use fatk_core::typing::{check, synthesize};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "fatk",
    version,
    about = "Proof terms and phase-semantic validity for atomic second-order logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check sequents `x:A |- t : B`, one per line.
    Check(Plain),
    /// Synthesize formulas for `x:A |- t`, one per line.
    Infer(Plain),
    /// Normalize terms in normal order.
    Normalize(NormalizeArgs),
    /// Decide validity of sequents against an atomic base.
    Valid(ValidArgs),
    /// Normalize a derivable sequent and print the normal proof.
    Extract(FuelArgs),
    /// List every normal proof of a goal up to a size bound.
    Enumerate(EnumerateArgs),
    /// Expand `&`, `|`, `~`, `Bot` and `exists` into the core language.
    Encode(Plain),
}

#[derive(Debug, Args)]
pub struct Input {
    /// A file path, `-` for standard input, or the input text itself.
    pub input: String,
    /// Print one JSON object per input line.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct Plain {
    #[command(flatten)]
    pub input: Input,
}

#[derive(Debug, Args)]
pub struct FuelArgs {
    #[command(flatten)]
    pub input: Input,
    /// Reduction steps allowed per normalization.
    #[arg(long, env = "FATK_FUEL", default_value_t = Fuel::DEFAULT.steps())]
    pub fuel: u64,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub common: FuelArgs,
    /// Print the full reduction trace as JSON.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct BaseArg {
    /// Comma-separated atoms whose constants count as axioms.
    #[arg(long, default_value = "")]
    pub base: String,
}

#[derive(Debug, Args)]
pub struct ValidArgs {
    #[command(flatten)]
    pub common: FuelArgs,
    #[command(flatten)]
    pub base: BaseArg,
    /// Phase model: E (elimination) or I (introduction).
    #[arg(long, default_value = "E")]
    pub flavor: Flavor,
    /// Largest enumerated witness, in AST nodes.
    #[arg(long, default_value_t = 7)]
    pub size: usize,
    /// Maximum number of nested formula unfoldings.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// File of extra witnesses, one `term : formula` per line.
    #[arg(long)]
    pub witnesses: Option<PathBuf>,
    /// Also try eight seeded random witnesses per formula.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub input: Input,
    #[command(flatten)]
    pub base: BaseArg,
    /// Largest term, in AST nodes.
    #[arg(long, default_value_t = 7)]
    pub size: usize,
}

/// How one job ended. Exit codes follow the worst outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    Exhausted,
    Negative,
    InputError,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Negative => 1,
            Outcome::InputError => 2,
            Outcome::Exhausted => 3,
        }
    }
}

/// The printed result of one job.
struct Report {
    outcome: Outcome,
    text: String,
    json: Value,
}

impl Report {
    fn new(outcome: Outcome, text: impl Into<String>, json: Value) -> Report {
        Report {
            outcome,
            text: text.into(),
            json,
        }
    }

    fn input_error(line: &str, message: impl std::fmt::Display) -> Report {
        let message = message.to_string();
        Report::new(
            Outcome::InputError,
            format!("error: {message}"),
            json!({ "input": line, "error": message }),
        )
    }
}

/// Parses arguments and runs the command, writing to `out` and `err`.
/// Returns the process exit code.
pub fn run(
    args: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(outcome) => outcome.code(),
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            Outcome::InputError.code()
        }
    }
}

fn execute(command: &Command, out: &mut dyn Write) -> Result<Outcome, String> {
    let input = match command {
        Command::Check(p) | Command::Infer(p) | Command::Encode(p) => &p.input,
        Command::Normalize(n) => &n.common.input,
        Command::Valid(v) => &v.common.input,
        Command::Extract(e) => &e.input,
        Command::Enumerate(e) => &e.input,
    };
    let text = read_input(&input.input)?;
    let lines = jobs(&text);
    if lines.is_empty() {
        return Err("no input lines".into());
    }
    let job: Box<dyn Fn(&str) -> Report> = match command {
        Command::Check(_) => Box::new(check_line),
        Command::Infer(_) => Box::new(infer_line),
        Command::Encode(_) => Box::new(encode_line),
        Command::Normalize(n) => {
            let fuel = fuel(n.common.fuel)?;
            let trace = n.trace;
            Box::new(move |l| normalize_line(l, fuel, trace))
        }
        Command::Extract(e) => {
            let fuel = fuel(e.fuel)?;
            Box::new(move |l| extract_line(l, fuel))
        }
        Command::Valid(v) => {
            let base = parse_base(&v.base.base)?;
            let budget = budget(v)?;
            let flavor = v.flavor;
            Box::new(move |l| valid_line(l, flavor, &base, &budget))
        }
        Command::Enumerate(e) => {
            let base = parse_base(&e.base.base)?;
            let size = e.size;
            Box::new(move |l| enumerate_line(l, &base, size))
        }
    };
    let mut worst = Outcome::Ok;
    for line in lines {
        let report = job(line);
        worst = worst.max(report.outcome);
        let written = if input.json {
            writeln!(out, "{}", report.json)
        } else if report.text.is_empty() {
            Ok(())
        } else {
            writeln!(out, "{}", report.text)
        };
        written.map_err(|e| e.to_string())?;
    }
    Ok(worst)
}

fn read_input(arg: &str) -> Result<String, String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"));
    }
    Ok(arg.to_string())
}

/// Non-blank lines with `--` comments removed.
fn jobs(text: &str) -> Vec<&str> {
    text.lines()
        .map(|l| l.split("--").next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect()
}

fn fuel(steps: u64) -> Result<Fuel, String> {
    Fuel::new(steps).map_err(|_| "fuel must be positive".to_string())
}

fn parse_base(s: &str) -> Result<AtomicBase, String> {
    let mut atoms = Vec::new();
    for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        atoms.push(Atom::try_new(name).ok_or_else(|| format!("`{name}` is not an atom name"))?);
    }
    Ok(AtomicBase::new(atoms))
}

fn budget(v: &ValidArgs) -> Result<WitnessBudget, String> {
    let mut budget = WitnessBudget {
        term_size_bound: v.size,
        unfold_depth: v.depth,
        fuel: fuel(v.common.fuel)?,
        ..WitnessBudget::default()
    };
    if let Some(path) = &v.witnesses {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        budget.witnesses =
            parse_witnesses(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(seed) = v.seed {
        budget.seed = seed;
        budget.random_witnesses = 8;
    }
    budget.validate().map_err(|e| e.to_string())?;
    Ok(budget)
}

fn check_line(line: &str) -> Report {
    let seq = match parse_sugared_sequent(line) {
        Ok(s) => s,
        Err(e) => return Report::input_error(line, e),
    };
    match check(&seq.context, &seq.term, &seq.formula) {
        Ok(d) => Report::new(
            Outcome::Ok,
            format!("derivable: {line}"),
            json!({ "input": line, "derivable": true, "derivation": d }),
        ),
        Err(e) => Report::new(
            Outcome::Negative,
            format!("not derivable: {line} -- {e}"),
            json!({ "input": line, "derivable": false, "reason": e.to_string() }),
        ),
    }
}

fn infer_line(line: &str) -> Report {
    let (ctx, term) = match parse_open_term(line) {
        Ok(p) => p,
        Err(e) => return Report::input_error(line, e),
    };
    match synthesize(&ctx, &term) {
        Ok(d) => Report::new(
            Outcome::Ok,
            d.formula().to_string(),
            json!({ "input": line, "formula": d.formula(), "derivation": d }),
        ),
        Err(e) => Report::new(
            Outcome::Negative,
            format!("no formula: {e}"),
            json!({ "input": line, "formula": null, "reason": e.to_string() }),
        ),
    }
}

fn encode_line(line: &str) -> Report {
    if let Ok(a) = expand_str(line) {
        let text = a.to_explicit_string();
        return Report::new(
            Outcome::Ok,
            text.clone(),
            json!({ "input": line, "formula": text }),
        );
    }
    match parse_sugared_term(line) {
        Ok(t) => Report::new(
            Outcome::Ok,
            t.to_string(),
            json!({ "input": line, "term": t }),
        ),
        Err(e) => Report::input_error(line, e),
    }
}

fn normalize_line(line: &str, fuel: Fuel, trace: bool) -> Report {
    let term = match parse_sugared_term(line) {
        Ok(t) => t,
        Err(e) => return Report::input_error(line, e),
    };
    let tr = normalize(&term, fuel);
    let (outcome, text) = match tr.status {
        TraceStatus::Normalized => (Outcome::Ok, tr.last().to_string()),
        TraceStatus::FuelExhausted => (Outcome::Exhausted, "FUEL-EXHAUSTED".to_string()),
    };
    let json = if trace {
        json!({ "input": line, "trace": tr })
    } else {
        let normal = (tr.status == TraceStatus::Normalized).then(|| tr.last().clone());
        json!({ "input": line, "normal": normal, "steps": tr.len(), "status": tr.status })
    };
    let text = if trace { json.to_string() } else { text };
    Report::new(outcome, text, json)
}

fn extract_line(line: &str, fuel: Fuel) -> Report {
    let seq = match parse_sugared_sequent(line) {
        Ok(s) => s,
        Err(e) => return Report::input_error(line, e),
    };
    match extract(&seq.term, &seq.context, &seq.formula, fuel) {
        Ok(x) => Report::new(
            Outcome::Ok,
            format!("{}\n{}", x.normal, x.derivation.render().trim_end()),
            json!({ "input": line, "normal": x.normal, "derivation": x.derivation, "trace": x.trace }),
        ),
        Err(e) => {
            let outcome = match e {
                ExtractError::FuelExhausted { .. } => Outcome::Exhausted,
                ExtractError::UnboundFreeVariable(_) => Outcome::InputError,
                ExtractError::CheckFailed { .. } | ExtractError::TraceReplayFailed(_) => {
                    Outcome::Negative
                }
            };
            let text = match outcome {
                Outcome::Exhausted => format!("FUEL-EXHAUSTED: {e}"),
                _ => format!("error: {e}"),
            };
            Report::new(
                outcome,
                text,
                json!({ "input": line, "error": e.to_string() }),
            )
        }
    }
}

fn valid_line(line: &str, flavor: Flavor, base: &AtomicBase, budget: &WitnessBudget) -> Report {
    let seq = match parse_sugared_sequent(line) {
        Ok(s) => s,
        Err(e) => return Report::input_error(line, e),
    };
    match is_valid(&seq.term, &seq.context, &seq.formula, flavor, base, budget) {
        Ok(v) => {
            let outcome = match v.status {
                Status::Certified | Status::BoundedOk => Outcome::Ok,
                Status::Unknown => Outcome::Exhausted,
                Status::Refuted => Outcome::Negative,
            };
            Report::new(outcome, v.summary(), json!({ "input": line, "verdict": v }))
        }
        Err(e) => Report::input_error(line, e),
    }
}

fn enumerate_line(line: &str, base: &AtomicBase, size: usize) -> Report {
    let goal = parse_goal(line).or_else(|e| {
        expand_str(line)
            .map(|a| (Default::default(), a))
            .map_err(|_| e)
    });
    let (ctx, goal): (_, Formula) = match goal {
        Ok(g) => g,
        Err(e) => return Report::input_error(line, e),
    };
    let terms = enumerate_normal(&ctx, &goal, base, size);
    let text: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
    Report::new(
        Outcome::Ok,
        text.join("\n"),
        json!({ "input": line, "terms": text }),
    )
}
