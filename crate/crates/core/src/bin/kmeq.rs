fn main() {
    std::process::exit(kmeq::harness::cli_main(std::env::args_os()));
}
