fn main() {
    std::process::exit(mdslab::run(std::env::args_os()));
}
