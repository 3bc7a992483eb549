fn main() {
    std::process::exit(liebn::harness::run(std::env::args_os()));
}
