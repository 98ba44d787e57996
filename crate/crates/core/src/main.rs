use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use steerlab::analysis::{
    equiv_class_capped, is_repetitive, mem_normalize, mem_sat, Bounds, EquivStatus, EquivVerdict, DEFAULT_FUEL,
    DEFAULT_MAX_STATES,
};
use steerlab::classify::{classify_atoms, classify_occurrences, detectability, ActionModel, OccurrenceClass};
use steerlab::compile::{eliminate_nonatomic, minimize, MinimizeOptions, DEFAULT_BODY_BUDGET, DEFAULT_CANDIDATE_CAP};
use steerlab::pga::{equiv_iseq_capped, exec, iseq_size, parse_iseq, render_iseq, thread_extract, InstrSeq, RunRecord};
use steerlab::prop::{render_prop_with, RenderMode};
use steerlab::valuation::{
    check_class_with_work, evaluate, evaluate_with_retry, ClassCheck, EvalTrace, ValuationClass, ValuationMachine,
};
use steerlab::{parse_prop, to_basic_form, Atom, Error, Prop};

const PROP_GRAMMAR: &str = "\
proposition grammar:
  atom      [a-z][a-zA-Z0-9_]*      constants  T  F
  prefix    ~p
  and       p && q    p .&& q
  or        p || q    p .|| q
  implies   p => q    p .=> q        (right associative)
  biimp     p <=> q   p .<=> q
  cond      p <| q |> r              (lowest, needs parentheses to nest)";

const ISEQ_GRAMMAR: &str = "\
instruction sequence grammar (instructions separated by `;`):
  a        work instruction
  +a  -a   atomic tests
  +(p) -(p) tests on a proposition
  #k       forward jump by k (k >= 0)
  !        termination";

#[derive(Parser)]
#[command(name = "steerlab", version, about = "Proposition algebra and steering points in instruction sequences")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BoundArgs {
    /// Largest machine enumerated.
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    max_states: usize,
    /// Trace length explored by history-based class checks.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
}

impl BoundArgs {
    fn bounds(self) -> Bounds {
        Bounds { max_states: self.max_states, fuel: self.fuel }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and re-render a proposition.
    Fmt {
        prop: String,
        /// Parenthesize every compound operand.
        #[arg(long)]
        full: bool,
    },
    /// Conditional normal form with atoms in condition positions.
    BasicForm { prop: String },
    /// Evaluate a proposition against a machine.
    Eval {
        prop: String,
        #[arg(long)]
        machine: PathBuf,
    },
    /// Evaluate, re-evaluating until the evaluation is reply stable.
    RetryEval {
        prop: String,
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_retries: usize,
    },
    /// Check whether a machine belongs to a valuation class.
    CheckClass {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long = "semantics", alias = "class")]
        class: ValuationClass,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Comma-separated work atoms resetting memorization.
        #[arg(long, value_delimiter = ',')]
        work: Vec<String>,
    },
    /// Repetitiveness with a witness.
    Analyze { prop: String },
    /// Normal form under memorizing semantics.
    Normalize { prop: String },
    /// Satisfiability under memorizing semantics.
    Sat { prop: String },
    /// Equivalence of propositions under a valuation class.
    Equiv {
        left: String,
        right: String,
        #[arg(long, default_value = "free")]
        semantics: ValuationClass,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Parse and re-render an instruction sequence.
    IseqFmt {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
    },
    /// Extracted thread.
    Thread {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
    },
    /// Size in tokens.
    Size {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
    },
    /// Run an instruction sequence against a machine.
    Exec {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
        #[arg(long)]
        machine: PathBuf,
    },
    /// Equivalence of instruction sequences under a valuation class.
    IseqEquiv {
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
        #[arg(long, default_value = "free")]
        semantics: ValuationClass,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Replace non-atomic tests by atomic steering fragments.
    Compile {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
    },
    /// Shortest equivalent instruction sequence.
    Minimize {
        #[arg(allow_hyphen_values = true)]
        iseq: String,
        #[arg(long, default_value = "free")]
        semantics: ValuationClass,
        /// Comma-separated atoms; defaults to the atoms of the sequence.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        /// Largest size searched; defaults to the size of the sequence.
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BODY_BUDGET)]
        body_budget: usize,
        #[arg(long)]
        non_repetitive_only: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Classify the atoms of a model, and the test occurrences of a sequence.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(allow_hyphen_values = true)]
        iseq: Option<String>,
    },
    /// Whether the side effect of one atom shows in the reply of another.
    Detect {
        #[arg(long)]
        model: PathBuf,
        effect: String,
        observer: String,
    },
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// What a subcommand produced: text, JSON payload and whether the verdict
/// was positive.
struct Report {
    text: String,
    json: Value,
    positive: bool,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Report {
        Report { text: text.into(), json, positive: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match std::env::var("STEERLAB_BUDGET") {
        Err(_) => DEFAULT_CANDIDATE_CAP,
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("error: STEERLAB_BUDGET must be a nonnegative integer, got `{v}`");
                return ExitCode::from(2);
            }
        },
    };
    match run(cli.command, Some(cap)) {
        Ok(report) => {
            if cli.json {
                let mut obj = json!({ "schema_version": 1 });
                if let (Value::Object(out), Value::Object(extra)) = (&mut obj, report.json) {
                    out.extend(extra);
                }
                emit(&format!("{}\n", serde_json::to_string_pretty(&obj).expect("serializable")));
            } else if report.text.ends_with('\n') {
                emit(&report.text);
            } else {
                emit(&format!("{}\n", report.text));
            }
            ExitCode::from(if report.positive { 0 } else { 1 })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn prop_arg(text: &str) -> Result<Prop, Failure> {
    parse_prop(text).map_err(|e| Failure::Usage(format!("in `{text}`: {e}\n{PROP_GRAMMAR}")))
}

fn iseq_arg(text: &str) -> Result<InstrSeq, Failure> {
    parse_iseq(text).map_err(|e| Failure::Usage(format!("in `{text}`: {e}\n{ISEQ_GRAMMAR}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn machine_arg(path: &Path) -> Result<ValuationMachine, Failure> {
    ValuationMachine::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn model_arg(path: &Path) -> Result<ActionModel, Failure> {
    ActionModel::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn atom_list(names: &[String]) -> Result<BTreeSet<Atom>, Failure> {
    names
        .iter()
        .map(|n| Atom::new(n.trim()).ok_or_else(|| Failure::Usage(format!("`{n}` is not an atom name"))))
        .collect()
}

fn tv(b: bool) -> char {
    if b {
        'T'
    } else {
        'F'
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn trace_text(m: &ValuationMachine, t: &EvalTrace) -> String {
    let mut out = String::new();
    for s in &t.steps {
        out.push_str(&format!("  {} @ {} -> {}\n", s.atom, m.state_name(s.state), tv(s.reply)));
    }
    out.push_str(&format!("  result {}, reply stable: {}\n", tv(t.result), if t.reply_stable { "yes" } else { "no" }));
    out
}

fn run_text(m: &ValuationMachine, r: &RunRecord) -> String {
    let mut out = String::new();
    for s in &r.trace {
        out.push_str(&format!("  {} @ {} -> {}\n", s.atom, m.state_name(s.state), tv(s.reply)));
    }
    out.push_str(&format!("  {:?} in {}\n", r.outcome, m.state_name(r.final_state)));
    out
}

fn verdict_report<T: Serialize>(
    command: &str,
    v: &EquivVerdict<T>,
    show: impl Fn(&ValuationMachine, &T) -> String,
) -> Report {
    let mut text = match v.status {
        EquivStatus::Equivalent => "equivalent\n".to_string(),
        EquivStatus::EquivalentUpToBounds => {
            let b = v.bounds.expect("bounds");
            format!("equivalent up to bounds (max states {}, fuel {})\n", b.max_states, b.fuel)
        }
        EquivStatus::Inequivalent => "inequivalent\n".to_string(),
    };
    if let Some(cx) = &v.counterexample {
        let m = &cx.machine;
        if m.state_count() == 1 {
            let assignment: Vec<String> =
                m.atoms().iter().enumerate().map(|(i, a)| format!("{a}={}", tv(m.reply(i, 0)))).collect();
            text.push_str(&format!("counterexample assignment: {}\n", assignment.join(" ")));
        }
        text.push_str("counterexample machine:\n");
        for line in m.to_file_text().lines() {
            text.push_str(&format!("  {line}\n"));
        }
        text.push_str(&format!("left:\n{}right:\n{}", show(m, &cx.left), show(m, &cx.right)));
    }
    Report { text, json: json!({ "command": command, "verdict": to_json(v) }), positive: v.holds() }
}

fn run(command: Command, cap: Option<u64>) -> Result<Report, Failure> {
    Ok(match command {
        Command::Fmt { prop, full } => {
            let p = prop_arg(&prop)?;
            let mode = if full { RenderMode::Full } else { RenderMode::Minimal };
            let s = render_prop_with(&p, mode);
            Report::ok(s.clone(), json!({ "command": "fmt", "prop": s }))
        }
        Command::BasicForm { prop } => {
            let bf = to_basic_form(&prop_arg(&prop)?);
            let s = bf.to_string();
            Report::ok(
                s.clone(),
                json!({ "command": "basic-form", "basic_form": s, "nodes": bf.node_count(), "depth": bf.depth() }),
            )
        }
        Command::Eval { prop, machine } => {
            let (p, m) = (prop_arg(&prop)?, machine_arg(&machine)?);
            let t = evaluate(&p, &m)?;
            Report::ok(trace_text(&m, &t), json!({ "command": "eval", "trace": to_json(&t) }))
        }
        Command::RetryEval { prop, machine, max_retries } => {
            let (p, m) = (prop_arg(&prop)?, machine_arg(&machine)?);
            match evaluate_with_retry(&p, &m, max_retries) {
                Ok(out) => {
                    let mut text = format!("result {} after {} attempt(s)\n", tv(out.result), out.attempts);
                    for t in &out.traces {
                        text.push_str(&trace_text(&m, t));
                    }
                    Report::ok(text, json!({ "command": "retry-eval", "outcome": to_json(&out) }))
                }
                Err(Error::RetriesExhausted(traces)) => {
                    let mut text = format!("not reply stable after {} attempt(s)\n", traces.len());
                    for t in &traces {
                        text.push_str(&trace_text(&m, t));
                    }
                    Report {
                        text,
                        json: json!({ "command": "retry-eval", "exhausted": true, "traces": to_json(&traces) }),
                        positive: false,
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::CheckClass { machine, class, fuel, work } => {
            let m = machine_arg(&machine)?;
            let work = atom_list(&work)?;
            match check_class_with_work(&m, class, fuel, &work) {
                ClassCheck::Ok => Report::ok(
                    format!("{class}: ok\n"),
                    json!({ "command": "check-class", "class": class, "ok": true }),
                ),
                ClassCheck::Violation(v) => {
                    let mut text = format!("{class}: violation: {}\n", v.reason);
                    for s in &v.trace {
                        text.push_str(&format!("  {} @ {} -> {}\n", s.atom, m.state_name(s.state), tv(s.reply)));
                    }
                    Report {
                        text,
                        json: json!({ "command": "check-class", "class": class, "ok": false, "violation": to_json(&v) }),
                        positive: false,
                    }
                }
            }
        }
        Command::Analyze { prop } => {
            let r = is_repetitive(&prop_arg(&prop)?);
            let text = match (&r.witness_path, &r.repeated_atom) {
                (Some(path), Some(a)) => {
                    let steps: Vec<String> = path.iter().map(|(x, b)| format!("{x}={}", tv(*b))).collect();
                    let mut t = format!("repetitive\nwitness path: {}{}{a}\n", steps.join(", "), if steps.is_empty() { "" } else { ", then " });
                    if let Some(m) = &r.witness_machine {
                        t.push_str("witness machine:\n");
                        for line in m.to_file_text().lines() {
                            t.push_str(&format!("  {line}\n"));
                        }
                    }
                    t
                }
                _ => "non-repetitive\n".to_string(),
            };
            Report::ok(text, json!({ "command": "analyze", "report": to_json(&r) }))
        }
        Command::Normalize { prop } => {
            let bf = mem_normalize(&prop_arg(&prop)?);
            let s = bf.to_string();
            Report::ok(s.clone(), json!({ "command": "normalize", "basic_form": s }))
        }
        Command::Sat { prop } => {
            let sat = mem_sat(&mem_normalize(&prop_arg(&prop)?))?;
            Report {
                text: if sat { "sat" } else { "unsat" }.into(),
                json: json!({ "command": "sat", "satisfiable": sat }),
                positive: sat,
            }
        }
        Command::Equiv { left, right, semantics, bounds } => {
            let (p, q) = (prop_arg(&left)?, prop_arg(&right)?);
            let v = equiv_class_capped(&p, &q, semantics, bounds.max_states, bounds.fuel, cap)?;
            verdict_report("equiv", &v, trace_text)
        }
        Command::IseqFmt { iseq } => {
            let s = render_iseq(&iseq_arg(&iseq)?);
            Report::ok(s.clone(), json!({ "command": "iseq-fmt", "iseq": s }))
        }
        Command::Thread { iseq } => {
            let t = thread_extract(&iseq_arg(&iseq)?);
            Report::ok(t.to_string(), json!({ "command": "thread", "thread": to_json(&t) }))
        }
        Command::Size { iseq } => {
            let n = iseq_size(&iseq_arg(&iseq)?);
            Report::ok(n.to_string(), json!({ "command": "size", "size": n }))
        }
        Command::Exec { iseq, machine } => {
            let (s, m) = (iseq_arg(&iseq)?, machine_arg(&machine)?);
            let r = exec(&s, &m)?;
            Report::ok(run_text(&m, &r), json!({ "command": "exec", "run": to_json(&r) }))
        }
        Command::IseqEquiv { left, right, semantics, bounds } => {
            let (x, y) = (iseq_arg(&left)?, iseq_arg(&right)?);
            let v = equiv_iseq_capped(&x, &y, semantics, bounds.bounds(), cap)?;
            verdict_report("iseq-equiv", &v, run_text)
        }
        Command::Compile { iseq } => {
            let out = eliminate_nonatomic(&iseq_arg(&iseq)?);
            let s = render_iseq(&out);
            Report::ok(s.clone(), json!({ "command": "compile", "iseq": s, "size": iseq_size(&out) }))
        }
        Command::Minimize { iseq, semantics, alphabet, max_size, body_budget, non_repetitive_only, bounds } => {
            let s = iseq_arg(&iseq)?;
            let alphabet = if alphabet.is_empty() { s.atoms() } else { atom_list(&alphabet)? };
            let options = MinimizeOptions {
                non_repetitive_only,
                body_budget,
                bounds: bounds.bounds(),
                cap,
                progress: true,
            };
            let max_size = max_size.unwrap_or_else(|| iseq_size(&s));
            match minimize(&s, semantics, &alphabet, max_size, &options) {
                Ok(out) => Report::ok(
                    format!("{} (size {})\n", out.result, out.size),
                    json!({ "command": "minimize", "outcome": to_json(&out) }),
                ),
                Err(Error::NoneWithinBudget { max_size }) => Report {
                    text: format!("no equivalent sequence of size <= {max_size}\n"),
                    json: json!({ "command": "minimize", "found": false, "max_size": max_size }),
                    positive: false,
                },
                Err(e) => return Err(e.into()),
            }
        }
        Command::Classify { model, iseq } => {
            let model = model_arg(&model)?;
            let report = classify_atoms(&model);
            let mut text = String::new();
            for (a, c) in &report.per_atom {
                text.push_str(&format!("{a}: {c}\n"));
            }
            let steering: Vec<String> = report.steering_set.iter().map(|a| a.to_string()).collect();
            text.push_str(&format!("steering atoms: {{{}}}\n{}\n", steering.join(", "), report.note));
            let mut json = json!({ "command": "classify", "atoms": to_json(&report) });
            let mut positive = true;
            if let Some(iseq) = iseq {
                let occ = classify_occurrences(&iseq_arg(&iseq)?, &model)?;
                let m = model.machine();
                for o in &occ {
                    let states: Vec<&str> = o.states.iter().map(|s| m.state_name(*s)).collect();
                    text.push_str(&format!("#{} {}: {} at {{{}}}", o.position, o.atom, o.class, states.join(", ")));
                    if let Some(note) = &o.note {
                        text.push_str(&format!(" ({note})"));
                    }
                    text.push('\n');
                }
                positive = !occ.iter().any(|o| o.class == OccurrenceClass::NonMarginal);
                json["occurrences"] = to_json(&occ);
            }
            Report { text, json, positive }
        }
        Command::Detect { model, effect, observer } => {
            let model = model_arg(&model)?;
            let atom = |n: &str| Atom::new(n).ok_or_else(|| Failure::Usage(format!("`{n}` is not an atom name")));
            let (a, b) = (atom(&effect)?, atom(&observer)?);
            let witness = detectability(&model, &a, &b)?;
            let m = model.machine();
            let text = match witness {
                Some(s) => format!("detectable: {b} changes after {a} in {}\n", m.state_name(s)),
                None => format!("not detectable: no reachable state where {a} changes the reply of {b}\n"),
            };
            Report {
                text,
                json: json!({
                    "command": "detect",
                    "detectable": witness.is_some(),
                    "witness": witness.map(|s| m.state_name(s).to_string()),
                }),
                positive: witness.is_some(),
            }
        }
    })
}
