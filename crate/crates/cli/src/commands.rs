use std::fmt::{self, Display};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use qpa::dfa2rpa;
use qpa::evolve::{
    check_threshold, decide, decide_majority, Decision, RecognitionResult, RecognizeOptions,
    Recognizer, Trace,
};
use qpa::matrixlab::{
    build_matrix, check_truncated_unitarity, enumerate_window_with, Seed, WindowOptions,
};
use qpa::model::{DfaSpec, QpaSpec};
use qpa::wellformed::{
    check_all, check_general, check_simplified_summary, CheckOptions, ConditionSummary,
};
use qpa::zoo;

use crate::args::{
    BatchArgs, CheckArgs, CompileArgs, MatrixArgs, OutputMode, RunArgs, RunOptions, SeedArg,
    ZooCommand,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REJECTED: u8 = 1;
pub const EXIT_FAILED: u8 = 2;
pub const EXIT_ERROR: u8 = 3;

/// Anything that ends a command with exit status 3.
#[derive(Debug)]
pub struct Failure(pub String);

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<qpa::Error> for Failure {
    fn from(e: qpa::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(e.to_string())
    }
}

pub type Outcome = Result<u8, Failure>;

pub struct Context {
    pub mode: OutputMode,
    pub tolerance: f64,
}

impl Context {
    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            tolerance: self.tolerance,
            ..CheckOptions::default()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<QpaSpec, Failure> {
    Ok(QpaSpec::from_json(&read(path)?)?)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(None, &s)
}

fn csv_stdout() -> csv::Writer<io::Stdout> {
    csv::Writer::from_writer(io::stdout())
}

pub fn check(ctx: &Context, args: &CheckArgs) -> Outcome {
    let spec = load_spec(&args.file)?;
    let opts = ctx.check_options();
    let structure = spec.validate_structure();
    let summary: ConditionSummary = if args.simplified {
        check_simplified_summary(&spec, &opts)?
    } else if args.general {
        check_general(&spec, &opts)
    } else {
        check_all(&spec, &opts)
    };
    let code = if !structure.is_empty() {
        EXIT_ERROR
    } else if summary.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    };
    match ctx.mode {
        OutputMode::Json => print_json(&json!({
            "file": args.file.display().to_string(),
            "passed": code == EXIT_OK,
            "structure": structure,
            "summary": summary,
        }))?,
        OutputMode::Csv => {
            let mut w = csv_stdout();
            w.write_record([
                "condition",
                "passed",
                "violations",
                "tuples",
                "worst_residual",
            ])?;
            for v in &structure {
                w.write_record(["structure", "false", "1", "1", v.kind.message()])?;
            }
            for o in &summary.conditions {
                w.write_record([
                    o.condition.name().to_string(),
                    o.passed.to_string(),
                    o.violations.to_string(),
                    o.tuples.to_string(),
                    o.worst_residual.to_string(),
                ])?;
            }
            w.flush()?;
        }
        OutputMode::Human => {
            let mut out = String::new();
            for v in &structure {
                out.push_str(&format!("structure  FAIL  {v}\n"));
            }
            for o in &summary.conditions {
                let verdict = if o.passed { "pass" } else { "FAIL" };
                out.push_str(&format!(
                    "{:<6} {verdict}  violations {:>6} / {:<8} worst residual {:.3e}  {}\n",
                    o.condition.name(),
                    o.violations,
                    o.tuples,
                    o.worst_residual,
                    o.condition.description()
                ));
                for r in o.reports.iter().take(args.witnesses) {
                    out.push_str(&format!(
                        "         at ({}) residual {:.3e}\n",
                        r.witness.join(", "),
                        r.residual
                    ));
                }
            }
            out.push_str(match code {
                EXIT_OK => "well-formed\n",
                EXIT_FAILED => "not well-formed\n",
                _ => "structurally invalid\n",
            });
            write_text(None, &out)?;
        }
    }
    Ok(code)
}

fn recognize_options(ctx: &Context, run: &RunOptions) -> Result<RecognizeOptions, Failure> {
    if let Some(t) = run.threshold {
        check_threshold(t)?;
    }
    let base = if run.force {
        RecognizeOptions::forced()
    } else {
        RecognizeOptions::default()
    };
    Ok(RecognizeOptions {
        max_steps: run.max_steps.get(),
        check: ctx.check_options(),
        ..base
    })
}

fn decision(result: &RecognitionResult, threshold: Option<f64>) -> Result<Decision, Failure> {
    Ok(match threshold {
        Some(t) => decide(result, t)?,
        None => decide_majority(result),
    })
}

fn exit_for(d: Decision) -> u8 {
    match d {
        Decision::Accepted => EXIT_OK,
        Decision::Rejected => EXIT_REJECTED,
        Decision::Inconclusive => EXIT_FAILED,
    }
}

#[derive(Serialize)]
struct ResultRow<'a> {
    word: &'a str,
    p_accept: f64,
    p_reject: f64,
    p_nonhalt: f64,
    steps: usize,
    halted: bool,
    decision: Decision,
}

impl<'a> ResultRow<'a> {
    fn new(word: &'a str, r: &RecognitionResult, decision: Decision) -> Self {
        ResultRow {
            word,
            p_accept: r.p_accept,
            p_reject: r.p_reject,
            p_nonhalt: r.p_nonhalt,
            steps: r.steps,
            halted: r.halted,
            decision,
        }
    }
}

fn human_trace(spec: &QpaSpec, t: &Trace) -> String {
    let mut out = String::new();
    for s in &t.steps {
        out.push_str(&format!(
            "step {:>3}  +acc {:.6}  +rej {:.6}  total {:.12}\n",
            s.step,
            s.p_accept_inc,
            s.p_reject_inc,
            s.total()
        ));
        for (c, a) in s.psi.iter() {
            out.push_str(&format!(
                "    {:+.6}{:+.6}i  {}\n",
                a.re,
                a.im,
                c.display(spec)
            ));
        }
        for (c, m) in &s.cancelled {
            out.push_str(&format!(
                "    cancelled {} (|sum| {m:.1e})\n",
                c.display(spec)
            ));
        }
        if s.lost > 0.0 {
            out.push_str(&format!("    lost past $: {:.6}\n", s.lost));
        }
    }
    out
}

pub fn run(ctx: &Context, args: &RunArgs) -> Outcome {
    let spec = load_spec(&args.file)?;
    let opts = recognize_options(ctx, &args.run)?;
    let rec = Recognizer::new(&spec, opts)?;
    let trace = rec.trace(&args.word)?;
    let r = trace.result;
    let d = decision(&r, args.run.threshold)?;
    match ctx.mode {
        OutputMode::Json => {
            let mut v = json!({
                "word": args.word,
                "result": r,
                "decision": d,
            });
            if args.trace {
                v["trace"] = trace.to_json(&spec)["steps"].clone();
            }
            print_json(&v)?;
        }
        OutputMode::Csv => {
            let mut w = csv_stdout();
            w.serialize(ResultRow::new(&args.word, &r, d))?;
            w.flush()?;
        }
        OutputMode::Human => {
            let mut out = String::new();
            if args.trace {
                out.push_str(&human_trace(&spec, &trace));
            }
            out.push_str(&format!(
                "p_accept  {:.12}\np_reject  {:.12}\np_nonhalt {:.12}\n",
                r.p_accept, r.p_reject, r.p_nonhalt
            ));
            if r.p_lost > 0.0 {
                out.push_str(&format!("p_lost    {:.12}\n", r.p_lost));
            }
            out.push_str(&format!(
                "steps {}{}\n{d}\n",
                r.steps,
                if r.halted {
                    ", halted"
                } else {
                    ", step limit reached"
                }
            ));
            write_text(None, &out)?;
        }
    }
    Ok(exit_for(d))
}

pub fn batch(ctx: &Context, args: &BatchArgs) -> Outcome {
    let spec = load_spec(&args.file)?;
    let opts = recognize_options(ctx, &args.run)?;
    let text = read(&args.words)?;
    let words: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let rec = Recognizer::new(&spec, opts)?;
    let results: Vec<(RecognitionResult, Decision)> = words
        .par_iter()
        .map(|w| -> Result<_, Failure> {
            let r = rec
                .recognize(w)
                .map_err(|e| Failure(format!("word `{w}`: {e}")))?;
            let d = decision(&r, args.run.threshold)?;
            Ok((r, d))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<ResultRow> = words
        .iter()
        .zip(&results)
        .map(|(w, (r, d))| ResultRow::new(w, r, *d))
        .collect();

    let mut csv_text = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(&mut csv_text);
        w.write_record([
            "word",
            "p_accept",
            "p_reject",
            "p_nonhalt",
            "steps",
            "halted",
            "decision",
        ])?;
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    let csv_text = String::from_utf8(csv_text).expect("csv output is UTF-8");
    match (&args.out, ctx.mode) {
        (Some(path), OutputMode::Json) => {
            write_text(Some(path), &csv_text)?;
            print_json(&json!({ "rows": rows.len(), "out": path.display().to_string() }))?;
        }
        (Some(path), _) => {
            write_text(Some(path), &csv_text)?;
            if ctx.mode == OutputMode::Human {
                write_text(
                    None,
                    &format!("{} rows written to {}\n", rows.len(), path.display()),
                )?;
            }
        }
        (None, OutputMode::Json) => print_json(&rows)?,
        (None, _) => write_text(None, &csv_text)?,
    }
    Ok(EXIT_OK)
}

pub fn compile_dfa(ctx: &Context, args: &CompileArgs) -> Outcome {
    let dfa = DfaSpec::from_json(&read(&args.input)?)?;
    let spec = dfa2rpa::compile(&dfa)?;
    let structure = spec.validate_structure();
    let summary = check_simplified_summary(&spec, &ctx.check_options())?;
    if !structure.is_empty() || !summary.passed {
        let mut failed: Vec<String> = structure.iter().map(|v| v.to_string()).collect();
        failed.extend(summary.failed().iter().map(|c| c.name().to_string()));
        if ctx.mode == OutputMode::Json {
            print_json(&json!({
                "states": spec.state_count(),
                "out": null,
                "passed": false,
                "failed": failed,
            }))?;
        }
        eprintln!(
            "compiled automaton failed its checks ({}); nothing written",
            failed.join(", ")
        );
        return Ok(EXIT_FAILED);
    }
    let text = spec.to_json();
    match &args.out {
        Some(path) => {
            write_text(Some(path), &text)?;
            match ctx.mode {
                OutputMode::Json => print_json(&json!({
                    "states": spec.state_count(),
                    "out": path.display().to_string(),
                    "passed": true,
                }))?,
                OutputMode::Csv => {
                    let mut w = csv_stdout();
                    w.write_record(["states", "out", "passed"])?;
                    w.write_record([
                        spec.state_count().to_string(),
                        path.display().to_string(),
                        "true".into(),
                    ])?;
                    w.flush()?;
                }
                OutputMode::Human => write_text(
                    None,
                    &format!(
                        "compiled {} states to {}; all simplified conditions pass\n",
                        spec.state_count(),
                        path.display()
                    ),
                )?,
            }
        }
        None => write_text(None, &text)?,
    }
    Ok(EXIT_OK)
}

pub fn matrix(ctx: &Context, args: &MatrixArgs) -> Outcome {
    let spec = load_spec(&args.file)?;
    let opts = WindowOptions::new(args.radius)
        .seed(match args.seed {
            SeedArg::Initial => Seed::Initial,
            SeedArg::Stacks => Seed::Stacks(args.stack_depth),
        })
        .cap(args.cap);
    let window = enumerate_window_with(&spec, &args.word, &opts)?;
    let m = build_matrix(&spec, &window)?;
    let report = args
        .verify
        .then(|| check_truncated_unitarity(&m, ctx.tolerance));
    let code = match &report {
        Some(r) if !r.passed => EXIT_FAILED,
        _ => EXIT_OK,
    };
    let dump = args.dump.then(|| m.to_dump());
    if let (Some(d), Some(path)) = (&dump, &args.out) {
        let mut s = serde_json::to_string_pretty(d)?;
        s.push('\n');
        write_text(Some(path), &s)?;
    }
    let inline_dump = if args.out.is_none() {
        dump.as_ref()
    } else {
        None
    };
    match ctx.mode {
        OutputMode::Json => {
            let mut v = json!({
                "word": args.word,
                "radius": args.radius,
                "dim": window.len(),
                "interior_cols": window.interior_cols().len(),
                "interior_rows": window.interior_rows().len(),
            });
            if let Some(r) = &report {
                v["verify"] = serde_json::to_value(r)?;
            }
            if let Some(d) = inline_dump {
                v["matrix"] = serde_json::to_value(d)?;
            }
            print_json(&v)?;
        }
        OutputMode::Csv => {
            let mut w = csv_stdout();
            w.write_record([
                "dim",
                "interior_cols",
                "interior_rows",
                "column_deviation",
                "row_deviation",
                "passed",
            ])?;
            let (cd, rd, p) = match &report {
                Some(r) => (
                    r.column_deviation.to_string(),
                    r.row_deviation.to_string(),
                    r.passed.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            w.write_record([
                window.len().to_string(),
                window.interior_cols().len().to_string(),
                window.interior_rows().len().to_string(),
                cd,
                rd,
                p,
            ])?;
            w.flush()?;
        }
        OutputMode::Human => {
            let mut out = format!(
                "window: {} configurations, {} interior columns, {} interior rows\n",
                window.len(),
                window.interior_cols().len(),
                window.interior_rows().len()
            );
            if let Some(r) = &report {
                out.push_str(&format!(
                    "column deviation {:.3e}\nrow deviation    {:.3e}\n",
                    r.column_deviation, r.row_deviation
                ));
                if let Some(row) = r.worst_row.filter(|_| r.row_deviation > r.tolerance) {
                    out.push_str(&format!("worst row        {}\n", m.labels[row]));
                }
                out.push_str(if r.passed {
                    "unitary on the interior\n"
                } else {
                    "NOT unitary on the interior\n"
                });
            }
            if args.grid {
                if m.rows() <= 64 {
                    out.push_str(&m.to_grid());
                } else {
                    out.push_str(&format!(
                        "grid omitted: dimension {} exceeds 64\n",
                        m.rows()
                    ));
                }
            }
            write_text(None, &out)?;
            if let Some(d) = inline_dump {
                print_json(d)?;
            }
        }
    }
    Ok(code)
}

pub fn zoo_cmd(ctx: &Context, cmd: &ZooCommand) -> Outcome {
    match cmd {
        ZooCommand::List => {
            #[derive(Serialize)]
            struct Row {
                name: &'static str,
                states: usize,
                claimed_probability: Option<f64>,
                language: &'static str,
            }
            let mut rows: Vec<Row> = zoo::entries()
                .iter()
                .map(|e| Row {
                    name: e.name,
                    states: e.spec.state_count(),
                    claimed_probability: Some(e.claimed_probability),
                    language: e.language,
                })
                .collect();
            for name in zoo::FIXTURES {
                let spec = zoo::spec_by_name(name).expect("fixture exists");
                rows.push(Row {
                    name,
                    states: spec.state_count(),
                    claimed_probability: None,
                    language: "(fixture, not well-formed)",
                });
            }
            match ctx.mode {
                OutputMode::Json => print_json(&rows)?,
                OutputMode::Csv => {
                    let mut w = csv_stdout();
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                }
                OutputMode::Human => {
                    let mut out = String::new();
                    for r in &rows {
                        let p = r
                            .claimed_probability
                            .map_or("-".to_string(), |p| format!("{p:.6}"));
                        out.push_str(&format!(
                            "{:<20} {:>3} states  p = {:<8}  {}\n",
                            r.name, r.states, p, r.language
                        ));
                    }
                    write_text(None, &out)?;
                }
            }
            Ok(EXIT_OK)
        }
        ZooCommand::Export { name, out } => {
            let spec = zoo::spec_by_name(name)
                .ok_or_else(|| Failure(format!("no zoo entry named `{name}`")))?;
            write_text(out.as_deref(), &spec.to_json())?;
            Ok(EXIT_OK)
        }
    }
}
