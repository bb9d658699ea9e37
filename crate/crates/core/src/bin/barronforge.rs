fn main() -> std::process::ExitCode {
    barronforge::cli::main()
}
