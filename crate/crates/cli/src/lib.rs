//! `homcount` command line: pattern listing, embedding, brute-force counts,
//! synthetic data, evaluation and the full pipeline.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 size-guard refusal.

mod args;
mod commands;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;

/// Raised for argument combinations clap cannot express.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .try_init();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n);
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| commands::execute(&cli)),
        Err(e) => Err(anyhow::Error::new(UsageError(format!("cannot start {:?} worker threads: {e}", cli.threads)))),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            log::error!("{err:#}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<homcount_core::Error>() {
        Some(homcount_core::Error::SizeGuard { .. }) => 3,
        _ => 2,
    }
}
