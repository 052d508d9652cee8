//! Conway family notation: parsing words and dot-word normal forms.

use std::fmt::Write;

use tangle_u1::notation::{dot_word_display, dot_word_normalize, parse, parse_conway, serialize, ConwayWord};

pub fn run_example() -> String {
    let mut out = String::new();
    for w in [".2.2", ".3.2.20", "(3,2+)(21,2-)", ".2.(-(3,2))", "(3,2)1(21,2)"] {
        let word = parse_conway(w).unwrap();
        let k = parse(w).unwrap();
        writeln!(out, "{w} => {}", serialize(&k)).unwrap();
        if let ConwayWord::Dot(e) = word {
            let n = dot_word_normalize(&e);
            let (shown, sign) = dot_word_display(&e);
            writeln!(out, "  normal form sign {} display {shown} ({sign:+})", n.sign).unwrap();
        }
    }
    match parse(".2.x") {
        Ok(_) => writeln!(out, "unexpected parse").unwrap(),
        Err(e) => writeln!(out, "error: {e}").unwrap(),
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
