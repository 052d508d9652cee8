//! The EM knots up to eleven crossings and their match with the table.

use std::fmt::Write;

use tangle_u1::em::{em_enumerate, em_square_form, em_standard_move_slope, em_table_em11, EMKnotParams, EMTangleParams};

pub fn run_example() -> String {
    let mut out = String::new();
    for e in em_enumerate(11) {
        writeln!(out, "{} cr={} {} {}", e.params, e.crossing_number, e.dot_word, e.square).unwrap();
    }
    let rows = em_table_em11();
    let matched = rows.iter().filter(|r| r.entry.is_some() && r.dot_agrees).count();
    writeln!(out, "table rows matched: {matched}/{}", rows.len()).unwrap();
    let k = EMKnotParams::new(3, 2, 0, 1);
    writeln!(out, "{k} square form {}", em_square_form(&k).unwrap()).unwrap();
    let t = EMTangleParams::new(1, 3, 2);
    writeln!(out, "{t} standard move slope {}", em_standard_move_slope(&t).unwrap()).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
