use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use metablock_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = run(&cli, &mut out, &mut io::stderr());
    if out.flush().is_err() {
        return ExitCode::from(metablock_cli::EXIT_USAGE);
    }
    ExitCode::from(code)
}
