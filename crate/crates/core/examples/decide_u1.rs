//! Deciding unknotting number one and reading the certificate.

use std::fmt::Write;

use tangle_u1::decider::decide_u1;
use tangle_u1::notation::parse;

pub fn run_example() -> String {
    let mut out = String::new();
    for w in [".2.2", ".2.20.2", "(3,2+)(21,2-)", "(3,2)(3,2)", ".2.(-(3,2))", ".2.(3,2)", "(3,2)1(3,2)"] {
        let k = parse(w).unwrap();
        let d = decide_u1(&k).unwrap();
        match &d.certificate {
            Some(c) => writeln!(
                out,
                "{w}: yes by {:?} at {} ({} -> {}), replay {}",
                c.case,
                c.site,
                c.replaced.as_ref().map_or("-".to_string(), |x| x.to_string()),
                c.replacement,
                c.replay
            )
            .unwrap(),
            None => writeln!(out, "{w}: no after {} rejected candidates", d.trace.len()).unwrap(),
        }
    }
    let d = decide_u1(&parse(".21.2").unwrap()).unwrap();
    writeln!(out, "{}", d.to_json(".21.2")).unwrap();
    match decide_u1(&parse("(typeI 1/3 2/5)").unwrap()) {
        Ok(_) => writeln!(out, "unexpected").unwrap(),
        Err(e) => writeln!(out, "(typeI 1/3 2/5): {e}").unwrap(),
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
