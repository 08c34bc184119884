fn main() -> std::process::ExitCode {
    momentpick::cli::run(std::env::args_os())
}
