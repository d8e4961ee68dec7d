use clap::Parser;
use mia_audit::cli::{run, Cli};
use std::process::ExitCode;

/// Caps rayon's worker count when `MIA_AUDIT_THREADS` is set.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("MIA_AUDIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        anyhow::anyhow!("MIA_AUDIT_THREADS must be a positive integer, got {raw:?}")
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
