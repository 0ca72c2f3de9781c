fn main() {
    std::process::exit(commutant::cli::run(std::env::args_os()));
}
