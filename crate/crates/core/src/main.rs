use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let outcome = iris_dilate::cli::run(std::env::args_os());
    if !outcome.message.is_empty() {
        eprintln!("{}", outcome.message.trim_end());
    }
    ExitCode::from(outcome.exit_code as u8)
}
