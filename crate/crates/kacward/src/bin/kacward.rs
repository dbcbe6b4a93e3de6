fn main() -> std::process::ExitCode {
    kacward::cli::main()
}
