use std::process::ExitCode;

fn main() -> ExitCode {
    match pvsubdiv_cli::commands::dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
