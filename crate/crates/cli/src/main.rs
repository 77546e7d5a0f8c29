fn main() {
    std::process::exit(recombination_cli::run(std::env::args_os()));
}
