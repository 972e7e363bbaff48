fn main() {
    std::process::exit(spinchain_fid::cli::run(std::env::args_os()));
}
