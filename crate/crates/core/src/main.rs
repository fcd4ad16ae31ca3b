fn main() {
    std::process::exit(rss_reflect::cli::run(std::env::args_os()));
}
