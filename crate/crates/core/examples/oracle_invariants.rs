//! Planar diagrams, the Jones polynomial and the determinant.

use std::fmt::Write;

use tangle_u1::decider::decide_u1;
use tangle_u1::notation::parse;
use tangle_u1::oracle::{evaluate, tree_to_diagram, PlanarDiagram, DEFAULT_CAP};

pub fn run_example() -> String {
    let mut out = String::new();
    let trefoil = PlanarDiagram::from_pd(&[[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 2]]).unwrap();
    writeln!(
        out,
        "trefoil: det {} jones {:?}",
        trefoil.determinant(DEFAULT_CAP).unwrap(),
        trefoil.jones(DEFAULT_CAP).unwrap()
    )
    .unwrap();

    let k = parse(".2.2").unwrap();
    let d = tree_to_diagram(&k, DEFAULT_CAP).unwrap();
    writeln!(out, ".2.2: {} crossings, writhe {}, pd {}", d.crossing_count(), d.writhe(), d.pd_code()).unwrap();
    let r = evaluate(&k, DEFAULT_CAP).unwrap();
    writeln!(out, ".2.2: det {} jones trivial {}", r.determinant, r.jones_is_one).unwrap();

    let replay = decide_u1(&k).unwrap().certificate.unwrap().replay;
    let r = evaluate(&replay, DEFAULT_CAP).unwrap();
    writeln!(out, "after the move: {replay} det {} unknotted {}", r.determinant, r.unknotted()).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
