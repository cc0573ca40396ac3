fn main() {
    std::process::exit(groenewold_cli::run(std::env::args_os()));
}
