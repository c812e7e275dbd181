fn main() -> std::process::ExitCode {
    bounded_approx::driver::main_entry()
}
