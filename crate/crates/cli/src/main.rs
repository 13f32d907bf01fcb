fn main() {
    std::process::exit(mucorr::run(std::env::args_os()));
}
