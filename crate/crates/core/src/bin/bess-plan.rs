fn main() {
    std::process::exit(bess_planner::cli::run(std::env::args_os()));
}
