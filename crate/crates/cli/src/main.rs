fn main() -> std::process::ExitCode {
    underlay_cli::app::main_with(std::env::args_os())
}
