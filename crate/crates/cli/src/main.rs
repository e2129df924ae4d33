use std::process::ExitCode;

fn main() -> ExitCode {
    let code = vpcstereo::cli::main_with_args(std::env::args_os(), &mut std::io::stdout());
    ExitCode::from(code as u8)
}
