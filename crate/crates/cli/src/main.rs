fn main() {
    std::process::exit(slid_bench::run(std::env::args_os()));
}
