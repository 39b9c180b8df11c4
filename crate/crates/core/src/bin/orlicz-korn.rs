fn main() {
    std::process::exit(orlicz_korn::cli::run(std::env::args_os()));
}
