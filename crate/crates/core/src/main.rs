fn main() {
    std::process::exit(csi_vitals::cli::main_with_args(std::env::args_os()));
}
