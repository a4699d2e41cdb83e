fn main() {
    let code = gifs::cli::run(std::env::args_os());
    std::process::exit(code);
}
