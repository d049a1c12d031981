fn main() {
    std::process::exit(kout_core::cli::main_with_env());
}
