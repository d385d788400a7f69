fn main() {
    std::process::exit(workbench_cli::dispatch(std::env::args_os()));
}
