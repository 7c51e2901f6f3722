fn main() {
    std::process::exit(qkd_phase_bound_cli::run());
}
