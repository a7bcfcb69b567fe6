fn main() -> std::process::ExitCode {
    scarce_rl::cli::main()
}
