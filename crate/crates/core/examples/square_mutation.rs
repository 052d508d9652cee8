//! Square tangles: normal forms, mutation and the small-slot shortcut.

use std::fmt::Write;

use tangle_u1::decider::decide_u1;
use tangle_u1::em::em_recognize_knot;
use tangle_u1::slopes::q;
use tangle_u1::tangles::{has_small_shape, mutate, square_normalize, PairSite, SquareTangle};

pub fn run_example() -> String {
    let mut out = String::new();
    let s = SquareTangle::filled(q(-1, 3), q(1, 2), q(1, 3), q(-1, 2));
    let n = square_normalize(&s).unwrap();
    writeln!(out, "{s} -> {} mirrored {}", n.form, n.mirrored).unwrap();
    writeln!(out, "small shape: {}", has_small_shape(&s)).unwrap();
    writeln!(out, "EM: {:?}", em_recognize_knot(&s).map(|r| r.params.to_string())).unwrap();
    for t in [s.clone(), mutate(&s, PairSite::First).unwrap(), mutate(&s, PairSite::Second).unwrap()] {
        let d = decide_u1(&t.to_knot().unwrap()).unwrap();
        writeln!(out, "{t}: {}", d.verdict).unwrap();
    }
    let plain = SquareTangle::filled(q(1, 3), q(1, 2), q(1, 3), q(1, 2));
    writeln!(out, "{plain}: {}", decide_u1(&plain.to_knot().unwrap()).unwrap().verdict).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
