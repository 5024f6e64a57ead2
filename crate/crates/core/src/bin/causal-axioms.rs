fn main() {
    std::process::exit(causal_axioms::cli::run(std::env::args_os()));
}
