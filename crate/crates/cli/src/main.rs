fn main() {
    std::process::exit(lshawkes_cli::run(std::env::args_os()));
}
