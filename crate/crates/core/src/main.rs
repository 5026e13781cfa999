fn main() {
    std::process::exit(usertype::cli::run(std::env::args_os()));
}
