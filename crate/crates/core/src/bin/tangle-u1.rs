fn main() {
    let code = tangle_u1::cli::run(std::env::args().skip(1), &mut std::io::stdout());
    std::process::exit(code);
}
