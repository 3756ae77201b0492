fn main() {
    std::process::exit(mvno_aka::harness::cli::main());
}
