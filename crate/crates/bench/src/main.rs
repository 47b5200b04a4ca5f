use std::process::ExitCode;

use clap::Parser;
use mhfe_bench::config::Cli;
use mhfe_bench::table::{to_csv_string, to_markdown};

fn main() -> ExitCode {
    let cfg = match Cli::parse().resolve() {
        Ok(c) => c,
        Err(errs) => {
            for e in errs {
                eprintln!("error: {e}");
            }
            return ExitCode::from(2);
        }
    };
    match mhfe_bench::run(&cfg) {
        Ok(out) => {
            if cfg.out.is_none() {
                print!("{}", to_csv_string(&out.rows));
            }
            print!("{}", to_markdown(&out.rows));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
