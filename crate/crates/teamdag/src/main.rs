fn main() {
    std::process::exit(teamdag::cli::run());
}
