use std::io::Write;

use clap::Parser;

fn main() {
    let cli = ssf_cli::Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = ssf_cli::run(cli, &mut out);
    let _ = out.flush();
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
