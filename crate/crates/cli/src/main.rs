use clap::Parser;
use qdisc_cli::{execute, Args, CliError, RunConfig};

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = RunConfig::from_args(args).and_then(|cfg| execute(&cfg)) {
        eprintln!("error: {e}");
        std::process::exit(CliError::exit_code(&e));
    }
}
