fn main() {
    std::process::exit(sphwavelet::cli::run(std::env::args_os()));
}
