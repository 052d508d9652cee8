//! Driving the command-line interface in process.

use std::fmt::Write;

use tangle_u1::cli::run_to_string;

pub fn run_example() -> String {
    let mut out = String::new();
    let dir = std::env::temp_dir().join(format!("tangle-u1-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("words.txt");
    std::fs::write(&file, "# family words\n.2.2\n.3.2.2\n(21,2+)-(21,2)\n(21,2)1(21,2)\n").unwrap();
    let path = file.to_string_lossy().into_owned();

    let (code, text) = run_to_string(["--format", "text", "batch", path.as_str(), "--jobs", "2"]);
    writeln!(out, "batch exit {code}\n{text}").unwrap();
    let (code, text) = run_to_string(["--format", "text", "table-em11"]);
    writeln!(out, "table exit {code}\n{text}").unwrap();
    let (code, text) = run_to_string(["oracle-check", ".210.2.2"]);
    writeln!(out, "oracle-check exit {code}\n{text}").unwrap();
    std::fs::remove_dir_all(&dir).ok();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
