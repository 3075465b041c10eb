fn main() -> std::process::ExitCode {
    theta_gauss::cli::main()
}
