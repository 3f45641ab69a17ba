use std::io::Write;
use std::process::ExitCode;

use contractions::commands::{run, EXIT_USAGE};

fn main() -> ExitCode {
    let response = match run(std::env::args_os(), &mut std::io::stdin()) {
        Ok(r) => r,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let written = match &response.output {
        Some(path) => std::fs::write(path, &response.document),
        None => std::io::stdout().write_all(response.document.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("contractions: cannot write output: {e}");
        return ExitCode::from(contractions::commands::EXIT_INPUT as u8);
    }
    if response.exit_code != 0 {
        if let Some(reason) = reason(&response.document) {
            eprintln!("contractions: {reason}");
        }
    }
    ExitCode::from(response.exit_code as u8)
}

fn reason(document: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(document).ok()?;
    Some(value.get("outcome")?.get("reason")?.as_str()?.to_string())
}
