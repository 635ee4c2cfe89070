use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let env_out = std::env::var_os(bellbench_cli::OUT_DIR_ENV).map(PathBuf::from);
    let code = bellbench_cli::run(
        &argv,
        env_out,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
