//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Budgets and sample sizes are fixed below.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use tangle_u1::cli::run_to_string;
use tangle_u1::decider::{decide_u1, is_unknot_closure, Decision};
use tangle_u1::em::{em_enumerate, em_recognize_knot, em_table_em11, TABLE_EM11};
use tangle_u1::notation::parse;
use tangle_u1::oracle::{evaluate, OracleError, DEFAULT_CAP};
use tangle_u1::slopes::{
    cf_canonical_positive, cf_eval, cf_reduce_zeros, kohn_palindrome, q, solve_vertical_clasp, ContinuedFraction,
    ExtRational,
};
use tangle_u1::tangles::{mutate, two_bridge_unknot, type_one_fill, Knot, PairSite, SquareTangle, TangleExpr};

const ENUMERATE_BUDGET: Duration = Duration::from_secs(5);
const CLASP_BUDGET: Duration = Duration::from_secs(10);
const CF_BUDGET: Duration = Duration::from_secs(5);
const CLASP_RANGE: i64 = 200;
const FILL_RANGE: i64 = 10;
const PERTURBATIONS: usize = 100;
const MUTATION_SAMPLES: usize = 500;
const SQUARE_MAX_DEN: i64 = 7;
const MUTATION_MAX_DEN: i64 = 5;
const CF_RANGE: i64 = 500;
const ZERO_SEQUENCES: usize = 10_000;
const SEED: u64 = 0x5eed_0001;

const YES_FAMILIES: [&str; 10] = [
    "(3,2+)(21,2-)",
    "(21,2+)(21,2-)",
    "(3,2+)-(21,2)",
    "(21,2+)-(21,2)",
    ".2.(-(3,2))",
    ".20.(-(3,2))",
    ".2.(-(21,2))",
    ".(-(3,2)).2",
    ".(-(3,2)).20",
    ".(-(21,2)).2",
];

const NO_WORDS: [&str; 23] = [
    ".2.20.2",
    ".21.20",
    ".31.2",
    ".31.20",
    ".22.20",
    ".3.2.2",
    ".3.20.2",
    ".30.2.2",
    ".2.21.2",
    "(3,2)(3,2)",
    "(21,2)(21,2)",
    "(3,2)(3,2-)",
    "(21,2)(21,2-)",
    "(3,2)-(21,2)",
    ".2.(3,2)",
    ".20.(3,2)",
    ".2.(21,2)",
    ".(3,2).2",
    ".(3,2).20",
    ".(21,2).2",
    "(3,2)1(3,2)",
    "(3,2)1(21,2)",
    "(21,2)1(21,2)",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn yes_words() -> Vec<&'static str> {
    TABLE_EM11.iter().map(|row| row.1).chain(YES_FAMILIES).collect()
}

fn decide_word(w: &str) -> Result<Decision, String> {
    let k = parse(w).map_err(|e| format!("{w}: {e}"))?;
    decide_u1(&k).map_err(|e| format!("{w}: {e}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let catalog = em_enumerate(11);
    let table = em_table_em11();
    let (code, text) = run_to_string(["--format", "text", "enumerate-em", "--max", "11"]);
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    if catalog.len() != 14 {
        problems.push(format!("{} enumerated", catalog.len()));
    }
    let mut hit = HashSet::new();
    for m in &table {
        match &m.entry {
            None => problems.push(format!("{} unmatched", m.word)),
            Some(e) => {
                hit.insert(e.params);
                if e.params != m.params {
                    problems.push(format!("{} represented by {}", m.word, e.params));
                }
                if e.crossing_number != m.crossing_number {
                    problems.push(format!("{} crossings {}", m.word, e.crossing_number));
                }
            }
        }
        if !m.dot_agrees {
            problems.push(format!("{} dot word", m.word));
        }
    }
    if hit.len() != catalog.len() {
        problems.push("not a bijection".into());
    }
    let lines = text.lines().filter(|l| !l.trim().is_empty()).count();
    if code != 0 || lines != 14 {
        problems.push(format!("cli exit {code}, {lines} lines"));
    }
    if elapsed > ENUMERATE_BUDGET {
        problems.push(format!("took {elapsed:?}"));
    }
    let detail = format!("{} knots, {:?}; {}", catalog.len(), elapsed, problems.join(", "));
    outcome(problems.is_empty(), detail)
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut yes = 0;
    for (want, list) in [(true, yes_words()), (false, NO_WORDS.to_vec())] {
        for w in list {
            match decide_word(w) {
                Ok(d) => {
                    yes += d.verdict as usize;
                    if d.verdict != want {
                        bad.push(format!("{w}={}", d.verdict));
                    }
                }
                Err(e) => bad.push(e),
            }
        }
    }
    let pass = bad.is_empty() && yes == 24;
    outcome(pass, format!("{yes} yes of {} words; wrong: {:?}", yes_words().len() + NO_WORDS.len(), bad))
}

fn key(n: i64, d: i64) -> (i64, i64) {
    let g = num_integer::gcd(n, d);
    (n / g, d / g)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let s_max = ((CLASP_RANGE as f64 / 2.0).sqrt().ceil() as i64) + 1;
    let mut brute = HashSet::new();
    for s in 1..=s_max {
        for r in -CLASP_RANGE..=CLASP_RANGE {
            if num_integer::gcd(r, s) != 1 {
                continue;
            }
            for sign in [1, -1] {
                brute.insert(key(2 * r * s + sign, 2 * s * s));
            }
        }
    }
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for d in 1..=CLASP_RANGE {
        for n in -CLASP_RANGE..=CLASP_RANGE {
            if num_integer::gcd(n, d) != 1 {
                continue;
            }
            checked += 1;
            let x = q(n, d);
            let solved = solve_vertical_clasp(&x);
            let sound = solved.as_ref().is_none_or(|w| w.value() == x);
            let b = brute.contains(&(n, d));
            let kohn = kohn_palindrome(&x).is_some_and(|k| cf_eval(&k.entries) == x);
            if !sound || solved.is_some() != b || kohn != b {
                bad.push(format!("{n}/{d}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed <= CLASP_BUDGET;
    outcome(pass, format!("{checked} fractions, {} disagree, {elapsed:?}; first {:?}", bad.len(), bad.first()))
}

fn slot_values(max_den: i64) -> Vec<ExtRational> {
    let mut out = Vec::new();
    for d in 2..=max_den {
        for n in -(d - 1)..d {
            if n != 0 && num_integer::gcd(n, d) == 1 {
                out.push(q(n, d));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let values = slot_values(6);
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in &values {
        for b in &values {
            checked += 1;
            let fill = type_one_fill(a, b).expect("non-integral slots");
            let found: Vec<i64> = (-FILL_RANGE..=FILL_RANGE)
                .filter(|&x| two_bridge_unknot(&a.add_int(&BigInt::from(x)), b))
                .collect();
            let agree = match &fill {
                Some(x) => found.len() == 1 && BigInt::from(found[0]) == *x,
                None => found.is_empty(),
            };
            if !agree {
                bad.push(format!("({a},{b})"));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} pairs, {} disagree {:?}", bad.len(), bad.first()))
}

fn leaf_paths(e: &TangleExpr, prefix: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, ExtRational)>) {
    if let TangleExpr::Leaf(x) = e {
        out.push((prefix.clone(), x.clone()));
    }
    let mut i = 0;
    while let Some(c) = e.child(i) {
        prefix.push(i);
        leaf_paths(c, prefix, out);
        prefix.pop();
        i += 1;
    }
}

fn unknot_by_theory(k: &Knot) -> bool {
    is_unknot_closure(&k.root, &ExtRational::zero())
}

fn criterion_5() -> Outcome {
    let mut replays = Vec::new();
    let mut bad = Vec::new();
    for w in yes_words() {
        match decide_word(w) {
            Ok(Decision { certificate: Some(c), .. }) => replays.push((w, c.replay)),
            Ok(_) => bad.push(format!("{w}: no certificate")),
            Err(e) => bad.push(e),
        }
    }
    let mut certified = 0;
    for (w, k) in &replays {
        match evaluate(k, DEFAULT_CAP) {
            Ok(r) if r.unknotted() => certified += 1,
            Ok(r) => bad.push(format!("{w}: det {} jones1 {}", r.determinant, r.jones_is_one)),
            Err(OracleError::CapExceeded { .. }) => {}
            Err(e) => bad.push(format!("{w}: {e}")),
        }
        if !unknot_by_theory(k) {
            bad.push(format!("{w}: replay not unknotted by theory"));
        }
    }

    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut tried, mut rejected, mut skipped) = (0, 0, 0);
    let mut attempts = 0;
    while tried < PERTURBATIONS && attempts < 100 * PERTURBATIONS && !replays.is_empty() {
        attempts += 1;
        let (w, k) = &replays[rng.gen_range(0..replays.len())];
        let mut leaves = Vec::new();
        leaf_paths(&k.root, &mut Vec::new(), &mut leaves);
        if leaves.is_empty() {
            continue;
        }
        let (path, x) = &leaves[rng.gen_range(0..leaves.len())];
        let j = BigInt::from(rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 });
        let changed = if x.is_infinite() { ExtRational::integer(j) } else { x.add_int(&j) };
        let Ok(root) = k.root.replace_at(path, TangleExpr::Leaf(changed.clone())) else { continue };
        let pk = Knot::new(root);
        if unknot_by_theory(&pk) {
            continue;
        }
        tried += 1;
        match evaluate(&pk, DEFAULT_CAP) {
            Ok(r) if r.determinant != 1 || !r.jones_is_one => rejected += 1,
            Ok(_) => bad.push(format!("{w}: {x} -> {changed} at {path:?} looks unknotted")),
            Err(OracleError::CapExceeded { .. }) => skipped += 1,
            Err(e) => bad.push(format!("{w} perturbed: {e}")),
        }
    }
    let pass = bad.is_empty() && tried == PERTURBATIONS && certified > 0;
    let detail = format!(
        "{certified}/{} replays certified; perturbations {tried}, rejected {rejected}, over cap {skipped}; {:?}",
        replays.len(),
        bad
    );
    outcome(pass, detail)
}

fn criterion_6() -> Outcome {
    let values = slot_values(SQUARE_MAX_DEN);
    let mut pairs = Vec::new();
    for i in 0..values.len() {
        for j in i..values.len() {
            pairs.push((values[i].clone(), values[j].clone()));
        }
    }
    let mut squares = Vec::new();
    for i in 0..pairs.len() {
        for j in i..pairs.len() {
            squares.push((i, j));
        }
    }
    let start = Instant::now();
    let results: Vec<(bool, Option<String>)> = squares
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = pairs[i].clone();
            let (c, d) = pairs[j].clone();
            let s = SquareTangle::filled(a, b, c, d);
            let em = em_recognize_knot(&s).is_some();
            let verdict = s.to_knot().map_err(|e| e.to_string()).and_then(|k| decide_u1(&k).map_err(|e| e.to_string()));
            match verdict {
                Ok(d) if d.verdict == em => (d.verdict, None),
                Ok(d) => (d.verdict, Some(format!("{s}: decide {} em {em}", d.verdict))),
                Err(e) => (false, Some(format!("{s}: {e}"))),
            }
        })
        .collect();
    let yes = results.iter().filter(|r| r.0).count();
    let bad: Vec<&String> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    let detail = format!("{} squares, {yes} yes, {} mismatches, {:?}; {:?}", squares.len(), bad.len(), start.elapsed(), bad.first());
    outcome(bad.is_empty(), detail)
}

fn random_slot(rng: &mut StdRng) -> ExtRational {
    loop {
        let d = rng.gen_range(2..=MUTATION_MAX_DEN);
        let n = rng.gen_range(-3 * d..=3 * d);
        if num_integer::gcd(n, d) == 1 {
            return q(n, d);
        }
    }
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let mut bad = Vec::new();
    let mut yes = 0;
    for _ in 0..MUTATION_SAMPLES {
        let s = SquareTangle::filled(random_slot(&mut rng), random_slot(&mut rng), random_slot(&mut rng), random_slot(&mut rng));
        let verdict = |s: &SquareTangle| -> Result<bool, String> {
            let k = s.to_knot().map_err(|e| e.to_string())?;
            decide_u1(&k).map(|d| d.verdict).map_err(|e| e.to_string())
        };
        let first = mutate(&s, PairSite::First).expect("filled");
        let second = mutate(&s, PairSite::Second).expect("filled");
        match (verdict(&s), verdict(&first), verdict(&second)) {
            (Ok(a), Ok(b), Ok(c)) if a == b && b == c => yes += a as usize,
            other => bad.push(format!("{s}: {other:?}")),
        }
    }
    outcome(bad.is_empty(), format!("{MUTATION_SAMPLES} squares, {yes} yes, {} unstable {:?}", bad.len(), bad.first()))
}

fn has_interior_zero(w: &ContinuedFraction) -> bool {
    let e = &w.entries;
    (1..e.len().saturating_sub(1)).any(|i| e[i] == BigInt::from(0)) || (e.len() >= 3 && e[0] == BigInt::from(0))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in 1..=CF_RANGE {
        for d in 1..=CF_RANGE {
            let x = q(p, d);
            let w = cf_canonical_positive(&x).expect("positive");
            let ends_zero = w.entries.last() == Some(&BigInt::from(0));
            if cf_eval(&w) != x || ends_zero != (x < ExtRational::integer(1)) || w.entries.iter().any(|e| e < &BigInt::from(0)) {
                bad.push(format!("cf {p}/{d}"));
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    for _ in 0..ZERO_SEQUENCES {
        let len = rng.gen_range(1..=8);
        let entries: Vec<i64> = (0..len).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(-5..=5) }).collect();
        let w = ContinuedFraction::from_i64s(&entries);
        let r = cf_reduce_zeros(&w);
        if cf_eval(&r) != cf_eval(&w) || has_interior_zero(&r) || r.len() > w.len() {
            bad.push(format!("zeros {entries:?}"));
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed <= CF_BUDGET;
    outcome(pass, format!("{} failures, {elapsed:?}; {:?}", bad.len(), bad.first()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 em table reproduction", criterion_1),
        ("2 verdict suite", criterion_2),
        ("3 clasp solver equivalence", criterion_3),
        ("4 type one fill", criterion_4),
        ("5 oracle concordance", criterion_5),
        ("6 square tangle property", criterion_6),
        ("7 mutation invariance", criterion_7),
        ("8 continued fractions", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
