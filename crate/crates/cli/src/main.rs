fn main() {
    std::process::exit(negmono_cli::run(std::env::args_os()));
}
