fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(rvflow::cli::run(&argv));
}
