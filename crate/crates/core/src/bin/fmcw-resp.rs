fn main() {
    std::process::exit(fmcw_respiration::cli::run(std::env::args_os()));
}
