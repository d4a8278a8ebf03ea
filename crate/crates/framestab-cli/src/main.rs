fn main() {
    env_logger::init();
    let args: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout();
    std::process::exit(framestab_cli::run(args, &mut out));
}
