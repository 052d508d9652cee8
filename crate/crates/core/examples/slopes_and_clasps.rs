//! Continued fractions, slope distance and the clasp solvers.

use std::fmt::Write;

use tangle_u1::slopes::{
    cf_canonical_positive, cf_eval, crossing_move, distance, integral_change_certificate, kohn_palindrome, q,
    solve_horizontal_clasp, solve_vertical_clasp, ExtRational,
};

pub fn run_example() -> String {
    let mut out = String::new();
    let x = q(17, 12);
    let cf = cf_canonical_positive(&x).unwrap();
    writeln!(out, "{x} = {cf} -> {}", cf_eval(&cf)).unwrap();
    writeln!(out, "distance(2/3, 1/2) = {}", distance(&q(2, 3), &q(1, 2))).unwrap();

    // (2rs±1)/(2s²) with r = 2, s = 3
    let v = q(11, 18);
    let w = solve_vertical_clasp(&v).unwrap();
    writeln!(out, "vertical clasp {v}: r={} s={} sign={}", w.r, w.s, w.sign).unwrap();
    let k = kohn_palindrome(&v).unwrap();
    writeln!(out, "palindrome {v}: {} clasp at {:?}", k.entries, k.clasp).unwrap();
    writeln!(out, "vertical clasp 3/5: {:?}", solve_vertical_clasp(&q(3, 5)).map(|w| w.s)).unwrap();

    let h = solve_horizontal_clasp(&q(7, 3), None).unwrap();
    writeln!(out, "horizontal clasp 7/3: k={} r={} s={} sign={}", h.k, h.r, h.s, h.sign).unwrap();
    let change = integral_change_certificate(&q(7, 3), &h.k).unwrap();
    writeln!(out, "integral change to {}: {}", h.k, serde_json::to_string(&change).unwrap()).unwrap();

    let mv = crossing_move(&q(2, 3), &ExtRational::zero()).unwrap();
    writeln!(out, "move 2/3 -> 0 via {}: s={}", mv.transform, mv.witness.s).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
