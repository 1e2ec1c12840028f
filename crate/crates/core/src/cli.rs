//! Command-line driver: argument parsing, command dispatch and report
//! rendering (human-readable or JSON).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::conditions::{self, CheckOptions, ConditionReport};
use crate::confluence;
use crate::limits::Limits;
use crate::report::{RenderedTrace, Verdict};
use crate::signature::Signature;
use crate::typing::{self, TypingEnv};

#[derive(Parser, Debug)]
#[command(
    name = "cacmod",
    about = "Type checker and termination/confluence analyzer for rewriting modulo equations",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON instead of human-readable output
    #[arg(long, global = true)]
    pub json: bool,

    /// Maximum number of reduction steps before giving up
    #[arg(long, global = true)]
    pub fuel: Option<u64>,

    /// Maximum size of an enumerated equivalence class
    #[arg(long, global = true)]
    pub max_class_size: Option<usize>,

    /// Omit the timestamp from JSON reports
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Exit with code 2 (instead of 1) when the result is unknown
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Input file
    pub file: PathBuf,
    /// Accept termination of the first-order rules as attested
    #[arg(long)]
    pub attest_fo_sn: bool,
    /// Step budget for the first-order non-termination search
    #[arg(long, default_value_t = 10_000)]
    pub refutation_steps: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the full termination checklist and report per-condition verdicts
    Check(CheckArgs),
    /// Check the computability-closure criterion for every rule and equation
    Schema {
        /// Input file
        file: PathBuf,
    },
    /// Enumerate critical pairs and decide confluence modulo the equations
    Confluence(CheckArgs),
    /// Check a term against an expected type
    Typecheck {
        /// Input file
        file: PathBuf,
        /// Term in the concrete syntax
        term: String,
        /// Expected type in the concrete syntax
        r#type: String,
    },
    /// Compute the normal form of a term
    Normalize {
        /// Input file
        file: PathBuf,
        /// Term in the concrete syntax
        term: String,
    },
    /// Decide whether two terms are joinable modulo the equations
    Join {
        /// Input file
        file: PathBuf,
        /// First term
        left: String,
        /// Second term
        right: String,
    },
}

/// Result of an invocation, kept separate from process exit for tests.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Outcome {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl Into<String>) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let mut limits = Limits::default();
    if let Some(fuel) = cli.fuel {
        limits.fuel = fuel;
    }
    if let Some(n) = cli.max_class_size {
        limits.max_class_size = n;
    }
    match &cli.command {
        Command::Check(args) => check_cmd(&cli, args, &limits),
        Command::Schema { file } => schema_cmd(&cli, file, &limits),
        Command::Confluence(args) => confluence_cmd(&cli, args, &limits),
        Command::Typecheck { file, term, r#type } => typecheck_cmd(&cli, file, term, r#type, &limits),
        Command::Normalize { file, term } => normalize_cmd(&cli, file, term, &limits),
        Command::Join { file, left, right } => join_cmd(&cli, file, left, right, &limits),
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            // clap handles --help/--version with success exit codes
            let code = if e.use_stderr() { 2 } else { 0 };
            Outcome {
                code,
                stdout: if code == 0 { e.to_string() } else { String::new() },
                stderr: if code == 0 { String::new() } else { e.to_string() },
            }
        }
    }
}

fn load(file: &PathBuf, limits: &Limits) -> Result<Signature, Outcome> {
    let source = std::fs::read_to_string(file)
        .map_err(|e| Outcome::error(format!("cannot read {}: {e}", file.display())))?;
    Signature::from_source_with(&source, limits).map_err(|e| Outcome::error(format!("{e}")))
}

// Rewriting-based commands refuse inputs with malformed equations: their
// semantics would silently ignore part of the equational theory.
fn require_wellformed(sig: &Signature) -> Result<(), Outcome> {
    if sig.malformed_equations.is_empty() {
        Ok(())
    } else {
        Err(Outcome::error(
            "the input contains equations that violate the shape conditions; run 'check' for details",
        ))
    }
}

fn to_json(value: &impl Serialize, cli: &Cli) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    if !cli.no_timestamp {
        if let Value::Object(map) = &mut v {
            let now = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("generated_at_unix".to_string(), Value::from(now));
        }
    }
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

fn unknown_exit(cli: &Cli) -> i32 {
    if cli.strict {
        2
    } else {
        1
    }
}

fn check_cmd(cli: &Cli, args: &CheckArgs, limits: &Limits) -> Outcome {
    let sig = match load(&args.file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let opts = CheckOptions {
        attest_fo_sn: args.attest_fo_sn || sig.attested_fo_sn(),
        refutation_steps: args.refutation_steps,
    };
    let report = conditions::assemble_report(&sig, &opts, limits);
    let code = match report.overall {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        _ => unknown_exit(cli),
    };
    let stdout = if cli.json {
        to_json(&CheckJson::new(&sig, &report), cli)
    } else {
        render_check(&sig, &report)
    };
    Outcome::ok(code, stdout)
}

#[derive(Serialize)]
struct SymbolJson {
    name: String,
    r#type: String,
    sort: &'static str,
    arity: usize,
    status: crate::signature::Status,
    kind: crate::signature::SymbolKind,
    constant: bool,
    primitive: bool,
}

#[derive(Serialize)]
struct CheckJson {
    symbols: Vec<SymbolJson>,
    conditions: Vec<conditions::Condition>,
    overall: Verdict,
    notes: Vec<String>,
}

impl CheckJson {
    fn new(sig: &Signature, report: &ConditionReport) -> CheckJson {
        let symbols = sig
            .symbol_ids()
            .map(|f| {
                let d = sig.decl(f);
                SymbolJson {
                    name: d.name.clone(),
                    r#type: sig.show_term(&d.ty),
                    sort: if sig.is_predicate(f) { "predicate" } else { "function" },
                    arity: d.arity,
                    status: d.status,
                    kind: sig.kind(f),
                    constant: sig.is_constant(f),
                    primitive: sig.is_primitive(f),
                }
            })
            .collect();
        CheckJson {
            symbols,
            conditions: report.conditions.clone(),
            overall: report.overall,
            notes: report.notes.clone(),
        }
    }
}

fn render_check(_sig: &Signature, report: &ConditionReport) -> String {
    let mut out = String::new();
    for c in &report.conditions {
        let req = if c.required { "" } else { " (informational)" };
        let _ = writeln!(out, "[{}] {}{}: {}", c.verdict, c.id, req, c.statement);
        if let Some(note) = &c.note {
            let _ = writeln!(out, "    note: {note}");
        }
        for e in &c.evidence {
            let _ = writeln!(out, "    - {}: {}", e.subject, e.detail);
            if let Some(trace) = &e.trace {
                render_trace(&mut out, trace);
            }
        }
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "overall: {}", report.overall);
    out
}

fn render_trace(out: &mut String, trace: &RenderedTrace) {
    let _ = writeln!(out, "      trace from '{}':", trace.source);
    for s in &trace.steps {
        let _ = writeln!(out, "        {} at {} via {}", s.relation, s.position, s.using);
    }
    let _ = writeln!(out, "      reaching '{}'", trace.target);
}

#[derive(Serialize)]
struct SchemaRuleJson {
    rule: String,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct SchemaDirectionJson {
    direction: crate::signature::EqDirection,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct SchemaEquationJson {
    equation: String,
    verdict: Verdict,
    directions: Vec<SchemaDirectionJson>,
}

#[derive(Serialize)]
struct SchemaJson {
    rules: Vec<SchemaRuleJson>,
    equations: Vec<SchemaEquationJson>,
    overall: Verdict,
}

fn schema_cmd(cli: &Cli, file: &PathBuf, limits: &Limits) -> Outcome {
    let sig = match load(file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let mut rules = Vec::new();
    let mut all_pass = true;
    for rule in &sig.rules {
        let v = crate::closure::general_schema_rule(&sig, rule, limits);
        all_pass &= v.pass();
        rules.push(SchemaRuleJson {
            rule: rule.text.clone(),
            verdict: if v.pass() { Verdict::Pass } else { Verdict::Fail },
            detail: if v.pass() { None } else { Some(v.describe()) },
        });
    }
    let mut equations = Vec::new();
    for eq in &sig.equations {
        let v = crate::closure::general_schema_equation(&sig, eq, limits);
        all_pass &= v.pass();
        let directions = v
            .directions
            .iter()
            .map(|d| SchemaDirectionJson {
                direction: d.direction,
                verdict: if d.pass() { Verdict::Pass } else { Verdict::Fail },
                detail: if d.pass() { None } else { Some(d.describe()) },
            })
            .collect();
        equations.push(SchemaEquationJson {
            equation: eq.text.clone(),
            verdict: if v.pass() { Verdict::Pass } else { Verdict::Fail },
            directions,
        });
    }
    for meq in &sig.malformed_equations {
        all_pass = false;
        equations.push(SchemaEquationJson {
            equation: meq.text.clone(),
            verdict: Verdict::Fail,
            directions: Vec::new(),
        });
    }
    let report = SchemaJson {
        rules,
        equations,
        overall: if all_pass { Verdict::Pass } else { Verdict::Fail },
    };
    let stdout = if cli.json {
        to_json(&report, cli)
    } else {
        let mut out = String::new();
        for r in &report.rules {
            let _ = writeln!(out, "[{}] {}", r.verdict, r.rule);
            if let Some(d) = &r.detail {
                let _ = writeln!(out, "    {d}");
            }
        }
        for e in &report.equations {
            let _ = writeln!(out, "[{}] {}", e.verdict, e.equation);
            for d in &e.directions {
                if let Some(msg) = &d.detail {
                    let _ = writeln!(out, "    {:?}: {msg}", d.direction);
                }
            }
        }
        let _ = writeln!(out, "overall: {}", report.overall);
        out
    };
    Outcome::ok(if all_pass { 0 } else { 1 }, stdout)
}

fn confluence_cmd(cli: &Cli, args: &CheckArgs, limits: &Limits) -> Outcome {
    let sig = match load(&args.file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let opts = CheckOptions {
        attest_fo_sn: args.attest_fo_sn || sig.attested_fo_sn(),
        refutation_steps: args.refutation_steps,
    };
    let sn_passed = conditions::sn_checklist_passes(&sig, &opts, limits);
    let analysis = confluence::confluence_verdict(&sig, sn_passed, limits);
    let report = analysis.to_report(&sig);
    let code = match analysis.verdict {
        confluence::ConfluenceVerdict::ConfluentOnClasses { .. } => 0,
        confluence::ConfluenceVerdict::NotConfluent => 1,
        confluence::ConfluenceVerdict::Unknown => unknown_exit(cli),
    };
    let stdout = if cli.json {
        to_json(&report, cli)
    } else {
        let mut out = String::new();
        if !sn_passed {
            let _ = writeln!(
                out,
                "warning: the termination checklist did not pass; confluence analysis \
                 proceeds without it"
            );
        }
        for cp in &report.critical_pairs {
            let _ = writeln!(
                out,
                "[{:?}] peak '{}' at {} -> ('{}', '{}') : {:?}",
                cp.kind, cp.peak, cp.position, cp.pair.0, cp.pair.1, cp.joinable
            );
        }
        let _ = writeln!(out, "verdict: {}", report.verdict);
        if let Some(t) = &report.theorem_used {
            let _ = writeln!(out, "theorem: {t:?}");
        }
        if report.arrow_confluent {
            let _ = writeln!(out, "the full conversion relation is confluent");
        }
        for b in &report.blocking_conditions {
            let _ = writeln!(out, "blocking: {b}");
        }
        out
    };
    Outcome::ok(code, stdout)
}

#[derive(Serialize)]
struct TypecheckJson {
    term: String,
    expected_type: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    inferred_type: Option<String>,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn typecheck_cmd(cli: &Cli, file: &PathBuf, term: &str, ty: &str, limits: &Limits) -> Outcome {
    let sig = match load(file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    if let Err(o) = require_wellformed(&sig) {
        return o;
    }
    let term = match sig.parse_term(term) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let ty = match sig.parse_term(ty) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let env = TypingEnv::new();
    let inferred = typing::infer(&sig, &env, &term, limits);
    let result = match &inferred {
        Ok(_) => typing::checked(&sig, &env, &term, &ty, limits),
        Err(e) => Err(e.clone()),
    };
    let report = TypecheckJson {
        term: sig.show_term(&term),
        expected_type: sig.show_term(&ty),
        inferred_type: inferred.as_ref().ok().map(|t| sig.show_term(t)),
        ok: result.is_ok(),
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    let code = match &result {
        Ok(()) => 0,
        Err(e) if e.is_resource() => 2,
        Err(_) => 1,
    };
    let stdout = if cli.json {
        to_json(&report, cli)
    } else if report.ok {
        format!("{} : {}\n", report.term, report.expected_type)
    } else {
        format!("type error: {}\n", report.error.as_deref().unwrap_or("unknown"))
    };
    Outcome::ok(code, stdout)
}

#[derive(Serialize)]
struct NormalizeJson {
    input: String,
    normal_form: String,
    steps: Vec<crate::report::RenderedStep>,
}

fn normalize_cmd(cli: &Cli, file: &PathBuf, term: &str, limits: &Limits) -> Outcome {
    let sig = match load(file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    if let Err(o) = require_wellformed(&sig) {
        return o;
    }
    let term = match sig.parse_term(term) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let (nf, trace) = match crate::reduction::normalize_traced(&term, &sig, limits) {
        Ok(r) => r,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let rendered = RenderedTrace::new(&sig, &term, &trace);
    let report = NormalizeJson {
        input: sig.show_term(&term),
        normal_form: sig.show_term(&nf),
        steps: rendered.steps,
    };
    let stdout = if cli.json {
        to_json(&report, cli)
    } else {
        format!("{}\n", report.normal_form)
    };
    Outcome::ok(0, stdout)
}

#[derive(Serialize)]
struct JoinJson {
    left: String,
    right: String,
    left_normal_form: String,
    right_normal_form: String,
    joinable: bool,
}

fn join_cmd(cli: &Cli, file: &PathBuf, left: &str, right: &str, limits: &Limits) -> Outcome {
    let sig = match load(file, limits) {
        Ok(s) => s,
        Err(o) => return o,
    };
    if let Err(o) = require_wellformed(&sig) {
        return o;
    }
    let left = match sig.parse_term(left) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let right = match sig.parse_term(right) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let left_nf = match crate::reduction::normalize(&left, &sig, limits) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let right_nf = match crate::reduction::normalize(&right, &sig, limits) {
        Ok(t) => t,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let joinable = match crate::reduction::joinable_modulo(&left, &right, &sig, limits) {
        Ok(b) => b,
        Err(e) => return Outcome::error(format!("{e}")),
    };
    let report = JoinJson {
        left: sig.show_term(&left),
        right: sig.show_term(&right),
        left_normal_form: sig.show_term(&left_nf),
        right_normal_form: sig.show_term(&right_nf),
        joinable,
    };
    let stdout = if cli.json {
        to_json(&report, cli)
    } else {
        format!("{}\n", if joinable { "true" } else { "false" })
    };
    Outcome::ok(if joinable { 0 } else { 1 }, stdout)
}
