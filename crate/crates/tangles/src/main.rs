fn main() -> std::process::ExitCode {
    tangles::cli::main()
}
