//! Command-line front end. `run` takes the arguments after the program
//! name and writes to the given sink; the exit status is returned.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::decider::{decide_u1, DecideError, Decision};
use crate::em::{em_enumerate, em_table_em11};
use crate::notation::{parse, parse_conway, serialize, ConwayWord};
use crate::oracle::{evaluate, DEFAULT_CAP};
use crate::tangles::{normalize, Norm, RatOrigin};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_LARGE: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "tangle-u1", about = "Unknotting number one for large algebraic knots")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Crossing cap for oracle evaluation.
    #[arg(long, default_value_t = DEFAULT_CAP, global = true)]
    oracle_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print its structured form.
    Parse { expr: String },
    /// Print the normalized tree.
    Normalize { expr: String },
    /// Decide unknotting number one.
    Decide { expr: String },
    /// List EM knots up to a crossing number.
    EnumerateEm {
        #[arg(long, default_value_t = 11)]
        max: u64,
    },
    /// Reproduce the 11-crossing EM table.
    TableEm11,
    /// Decide every line of a file ('#' starts a comment).
    Batch {
        file: String,
        /// Worker threads; output order is input order.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Include per-record timings (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Decide and replay certificates through the oracle.
    OracleCheck {
        exprs: Vec<String>,
        #[arg(long)]
        file: Option<String>,
    },
}

fn emit(out: &mut dyn Write, line: impl AsRef<str>) {
    let _ = writeln!(out, "{}", line.as_ref());
}

fn error_json(input: &str, kind: &str, msg: &str) -> String {
    json!({"schema": 1, "input": input, "error": kind, "message": msg}).to_string()
}

pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("tangle-u1".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let fmt = cli.format;
    match cli.command {
        Command::Parse { expr } => cmd_parse(&expr, fmt, out),
        Command::Normalize { expr } => cmd_normalize(&expr, fmt, out),
        Command::Decide { expr } => cmd_decide(&expr, fmt, out),
        Command::EnumerateEm { max } => cmd_enumerate(max, fmt, out),
        Command::TableEm11 => cmd_table(fmt, out),
        Command::Batch { file, jobs, timings } => cmd_batch(&file, jobs, timings, fmt, out),
        Command::OracleCheck { exprs, file } => cmd_oracle(exprs, file, cli.oracle_cap, fmt, out),
    }
}

/// Runs and captures the output.
pub fn run_to_string<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut buf = Vec::new();
    let code = run(args, &mut buf);
    (code, String::from_utf8_lossy(&buf).into_owned())
}

fn cmd_parse(expr: &str, fmt: Format, out: &mut dyn Write) -> i32 {
    match parse(expr) {
        Ok(k) => {
            let s = serialize(&k);
            match fmt {
                Format::Text => emit(out, s),
                Format::Json => emit(out, json!({"schema": 1, "input": expr, "tree": s}).to_string()),
            }
            EXIT_OK
        }
        Err(e) => {
            emit(out, error_json(expr, "parse", &e.to_string()));
            EXIT_PARSE
        }
    }
}

fn norm_text(n: &Norm) -> String {
    match n {
        Norm::Rat { value, origin } => match origin {
            RatOrigin::Leaf { .. } | RatOrigin::Synthetic => value.to_string(),
            RatOrigin::Twist { .. } => format!("{value}~"),
        },
        Norm::Sum { pieces, .. } => {
            let inner: Vec<String> = pieces.iter().map(norm_text).collect();
            format!("(sum {})", inner.join(" "))
        }
        Norm::Mark { m, inner, .. } => format!("(mark {m} {})", norm_text(inner)),
    }
}

fn cmd_normalize(expr: &str, fmt: Format, out: &mut dyn Write) -> i32 {
    match parse(expr) {
        Ok(k) => {
            let n = normalize(&k.root);
            let s = norm_text(&n);
            match fmt {
                Format::Text => emit(out, s),
                Format::Json => {
                    emit(out, json!({"schema": 1, "input": expr, "normalized": s, "replay": serialize(&crate::tangles::Knot::new(n.to_expr()))}).to_string())
                }
            }
            EXIT_OK
        }
        Err(e) => {
            emit(out, error_json(expr, "parse", &e.to_string()));
            EXIT_PARSE
        }
    }
}

enum Outcome {
    Decided(Decision),
    Failed(i32, &'static str, String),
}

fn decide_text(input: &str) -> Outcome {
    let k = match parse(input) {
        Ok(k) => k,
        Err(e) => return Outcome::Failed(EXIT_PARSE, "parse", e.to_string()),
    };
    match decide_u1(&k) {
        Ok(d) => Outcome::Decided(d),
        Err(e @ DecideError::NotLargeAlgebraic) => Outcome::Failed(EXIT_NOT_LARGE, "not-large-algebraic", e.to_string()),
        Err(e @ DecideError::Tangle(_)) => Outcome::Failed(EXIT_PARSE, "parse", e.to_string()),
        Err(e @ DecideError::Invariant(_)) => Outcome::Failed(EXIT_INVARIANT, "invariant", e.to_string()),
    }
}

fn decision_line(input: &str, d: &Decision) -> String {
    match &d.certificate {
        Some(c) => format!(
            "{input}: yes ({:?} at {}; {} -> {})",
            c.case,
            c.site,
            c.replaced.as_ref().map_or("tangle".to_string(), |v| v.to_string()),
            c.replacement
        ),
        None => format!("{input}: no ({} candidates rejected)", d.trace.len()),
    }
}

fn cmd_decide(expr: &str, fmt: Format, out: &mut dyn Write) -> i32 {
    match decide_text(expr) {
        Outcome::Decided(d) => {
            match fmt {
                Format::Json => emit(out, d.to_json(expr).to_string()),
                Format::Text => {
                    emit(out, decision_line(expr, &d));
                    for t in &d.trace {
                        emit(out, format!("  {:?} {}: {}", t.check, t.site, t.reason));
                    }
                }
            }
            EXIT_OK
        }
        Outcome::Failed(code, kind, msg) => {
            match fmt {
                Format::Json => emit(out, error_json(expr, kind, &msg)),
                Format::Text => emit(out, format!("{expr}: {kind}: {msg}")),
            }
            code
        }
    }
}

fn cmd_enumerate(max: u64, fmt: Format, out: &mut dyn Write) -> i32 {
    for e in em_enumerate(max) {
        match fmt {
            Format::Text => emit(out, format!("{} {} {} {}", e.params, e.dot_word, e.crossing_number, e.square)),
            Format::Json => emit(
                out,
                json!({
                    "params": e.params.to_string(),
                    "abc": e.abc.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "dot_word": e.dot_word,
                    "dot_sign": e.dot_sign,
                    "crossing_number": e.crossing_number,
                    "square": e.square.to_string(),
                })
                .to_string(),
            ),
        }
    }
    EXIT_OK
}

fn cmd_table(fmt: Format, out: &mut dyn Write) -> i32 {
    let rows = em_table_em11();
    let mut bad = false;
    for r in &rows {
        let sign = if r.sign < 0 { "−" } else { "" };
        let name = if r.name.is_empty() { "-" } else { r.name };
        let rep = r.entry.as_ref().map(|e| e.params.to_string());
        bad |= r.entry.is_none() || !r.dot_agrees;
        match fmt {
            Format::Text => emit(
                out,
                format!(
                    "{name} {} {sign}{} cr={} enumerated={} dot={}",
                    r.word,
                    r.params,
                    r.crossing_number,
                    rep.as_deref().unwrap_or("none"),
                    r.entry.as_ref().map_or("-", |e| e.dot_word.as_str())
                ),
            ),
            Format::Json => emit(
                out,
                json!({
                    "name": r.name,
                    "word": r.word,
                    "sign": r.sign,
                    "params": r.params.to_string(),
                    "crossing_number": r.crossing_number,
                    "enumerated": rep,
                    "enumerated_word": r.entry.as_ref().map(|e| e.dot_word.clone()),
                    "dot_agrees": r.dot_agrees,
                    "sign_agrees": r.sign_agrees,
                })
                .to_string(),
            ),
        }
    }
    if bad {
        EXIT_INVARIANT
    } else {
        EXIT_OK
    }
}

fn family_of(line: &str) -> &'static str {
    match parse_conway(line) {
        Ok(ConwayWord::Dot(_)) => "dot",
        Ok(ConwayWord::DotPair { .. }) => "dot-pair",
        Ok(ConwayWord::PairPair(..)) => "pair-pair",
        Ok(ConwayWord::PairOnePair(..)) => "pair-1-pair",
        Err(_) => "structured",
    }
}

fn batch_record(line: &str, timings: bool) -> (Value, &'static str, &'static str) {
    let start = Instant::now();
    let outcome = decide_text(line);
    let ms = start.elapsed().as_secs_f64() * 1000.0;
    let (mut v, status) = match &outcome {
        Outcome::Decided(d) => {
            let mut v = d.to_json(line);
            v["status"] = json!("ok");
            (v, if d.verdict { "yes" } else { "no" })
        }
        Outcome::Failed(_, kind, msg) => {
            (json!({"schema": 1, "input": line, "status": kind, "message": msg}), *kind)
        }
    };
    if timings {
        v["millis"] = json!(ms);
    }
    (v, family_of(line), status)
}

fn read_lines(file: &str) -> Result<Vec<String>, std::io::Error> {
    let text = std::fs::read_to_string(file)?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn cmd_batch(file: &str, jobs: usize, timings: bool, fmt: Format, out: &mut dyn Write) -> i32 {
    let lines = match read_lines(file) {
        Ok(l) => l,
        Err(e) => {
            emit(out, error_json(file, "io", &e.to_string()));
            return EXIT_PARSE;
        }
    };
    let jobs = jobs.max(1).min(lines.len().max(1));
    let mut records: Vec<Option<(Value, &'static str, &'static str)>> = vec![None; lines.len()];
    std::thread::scope(|scope| {
        let chunk = lines.len().div_ceil(jobs).max(1);
        let handles: Vec<_> = lines
            .chunks(chunk)
            .map(|ls| scope.spawn(move || ls.iter().map(|l| batch_record(l, timings)).collect::<Vec<_>>()))
            .collect();
        let mut i = 0;
        for h in handles {
            for r in h.join().expect("batch worker") {
                records[i] = Some(r);
                i += 1;
            }
        }
    });
    let mut summary: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for r in records.into_iter().flatten() {
        let (v, family, status) = r;
        *summary.entry(family).or_default().entry(status).or_default() += 1;
        match fmt {
            Format::Json => emit(out, v.to_string()),
            Format::Text => emit(
                out,
                format!("{}: {}", v["input"].as_str().unwrap_or(""), v.get("verdict").and_then(Value::as_str).unwrap_or(status)),
            ),
        }
    }
    emit(out, json!({"summary": summary}).to_string());
    EXIT_OK
}

fn cmd_oracle(mut exprs: Vec<String>, file: Option<String>, cap: usize, fmt: Format, out: &mut dyn Write) -> i32 {
    if let Some(f) = file {
        match read_lines(&f) {
            Ok(l) => exprs.extend(l),
            Err(e) => {
                emit(out, error_json(&f, "io", &e.to_string()));
                return EXIT_PARSE;
            }
        }
    }
    let mut worst = EXIT_OK;
    for e in &exprs {
        let d = match decide_text(e) {
            Outcome::Decided(d) => d,
            Outcome::Failed(code, kind, msg) => {
                emit(out, error_json(e, kind, &msg));
                worst = worst.max(code);
                continue;
            }
        };
        let Some(c) = &d.certificate else {
            emit(out, json!({"schema": 1, "input": e, "verdict": "no", "oracle": null}).to_string());
            continue;
        };
        let report = evaluate(&c.replay, cap);
        let (status, detail) = match &report {
            Ok(r) if r.unknotted() => ("certified", json!({"crossings": r.crossings, "determinant": r.determinant, "jones_is_one": true})),
            Ok(r) => {
                worst = EXIT_INVARIANT;
                ("refuted", json!({"crossings": r.crossings, "components": r.components, "determinant": r.determinant, "jones_is_one": r.jones_is_one}))
            }
            Err(err) => ("skipped", json!({"reason": err.to_string()})),
        };
        match fmt {
            Format::Json => emit(
                out,
                json!({"schema": 1, "input": e, "verdict": "yes", "replay": c.replay.to_string(), "oracle": status, "detail": detail}).to_string(),
            ),
            Format::Text => emit(out, format!("{e}: {status} {detail}")),
        }
    }
    worst
}
