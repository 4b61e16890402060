//! `trpnet` command-line front end.
//!
//! Exit codes: 0 success, 2 parse or input error, 3 extraction error,
//! 4 domain or capacity error, 5 numerical error.

mod args;
mod manifest;
mod run;

use clap::Parser;

use crate::args::Command;

#[derive(Parser, Debug)]
#[command(name = "trpnet", version, about = "Superradiance in tryptophan dipole networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn exit_code(err: &anyhow::Error) -> i32 {
    fn of(e: &trpnet::Error) -> i32 {
        use trpnet::Error::*;
        match e {
            Parse { .. } | Format { .. } | Io(_) => 2,
            EmptyResult | MissingAtom { .. } | Geometry(_) => 3,
            Domain(_) | Capacity { .. } | Singularity { .. } | InsufficientData(_) => 4,
            NonConvergence { .. } | QuasiDegenerate { .. } | Numerical(_) => 5,
            Realization { source, .. } => of(source),
        }
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<trpnet::Error>() {
            return of(e);
        }
        if cause.is::<std::io::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    1
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Err(err) = run::execute(cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}
