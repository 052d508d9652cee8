//! Building tangle trees, normalizing them and reading off unknotting slopes.

use std::fmt::Write;

use tangle_u1::decider::{complement_requirement, is_large_algebraic, unknotting_slope};
use tangle_u1::notation::parse;
use tangle_u1::slopes::q;
use tangle_u1::tangles::{normalize, BraidLetter, BraidWord, Knot, Symmetry, TangleExpr};

pub fn run_example() -> String {
    let mut out = String::new();
    let m = TangleExpr::type_one(q(-1, 3), q(-3, 2)).unwrap();
    writeln!(out, "{m}: {:?}", unknotting_slope(&m)).unwrap();
    let twisted = TangleExpr::braid(BraidWord(vec![BraidLetter::HPlus, BraidLetter::VMinus]), m.clone());
    writeln!(out, "{twisted}: {:?}", unknotting_slope(&twisted)).unwrap();
    let ii = TangleExpr::type_two(q(1, 2), m.clone()).unwrap();
    writeln!(out, "{ii}: {:?}", unknotting_slope(&ii)).unwrap();

    let square = TangleExpr::type_three(
        TangleExpr::pair(q(1, 3), q(-1, 2)),
        TangleExpr::sym(Symmetry::R, TangleExpr::pair(q(1, 2), q(-2, 3))),
    );
    let k = Knot::new(square);
    let n = normalize(&k.root);
    writeln!(out, "normalized: {n:?}").unwrap();
    writeln!(out, "large algebraic: {}", is_large_algebraic(&n)).unwrap();
    writeln!(out, "requirement at [1]: {:?}", complement_requirement(&k, &[1]).unwrap()).unwrap();

    let parsed = parse("(closure (typeIII (typeI 1/3 -1/2) (sym r (typeI 1/2 -2/3))))").unwrap();
    writeln!(out, "same tree from text: {}", parsed == k).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
