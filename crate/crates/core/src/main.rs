fn main() {
    std::process::exit(k3_motivic::cli::run(std::env::args()));
}
