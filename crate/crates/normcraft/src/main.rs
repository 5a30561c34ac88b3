use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    normcraft::cli::init_threads();
    let status = normcraft::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    ExitCode::from(status as u8)
}
