fn main() {
    let code = landcover_svm::cli::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
