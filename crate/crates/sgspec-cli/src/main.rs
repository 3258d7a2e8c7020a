//! `sgspec`: locate, count, and verify the discrete spectrum described by a
//! run configuration.
//!
//! Verbs: `spectrum`, `count`, `prufer`, `verify`.  The worker-pool size is
//! taken from `SGSPEC_WORKERS` when set.

use clap::{Parser, Subcommand};
use sg_spectrum::config::RunConfig;
use sg_spectrum::driver::{self, Verb};
use sg_spectrum::search::RegionKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sgspec",
    about = "Discrete spectrum of the stationary sine-Gordon scattering problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate all eigenvalues in the search region and write spectrum.json
    Spectrum(RunArgs),
    /// Evaluate the counting theorems and write count.json
    Count(RunArgs),
    /// Sample the Prüfer endpoint-angle curve and write prufer.csv
    Prufer(RunArgs),
    /// Run the full search plus verification; exit 2 on any failed check
    Verify(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run configuration file
    config: PathBuf,
    /// Override the integrator tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override the output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the search region: r_min,r_max,theta_min,theta_max
    #[arg(long)]
    region: Option<String>,
}

fn apply_overrides(config: &mut RunConfig, args: &RunArgs) -> Result<(), String> {
    if let Some(tol) = args.tol {
        if tol <= 0.0 {
            return Err("--tol must be positive".into());
        }
        config.tolerances.ode = tol;
        config.tolerances.quadrature = tol;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if let Some(region) = &args.region {
        let parts: Vec<&str> = region.split(',').collect();
        if parts.len() != 4 {
            return Err("--region expects r_min,r_max,theta_min,theta_max".into());
        }
        let mut vals = [0.0f64; 4];
        for (i, s) in parts.iter().enumerate() {
            vals[i] = s
                .trim()
                .parse()
                .map_err(|e| format!("--region component '{s}': {e}"))?;
        }
        config.region.kind = RegionKind::AnnulusSector {
            r_min: vals[0],
            r_max: vals[1],
            theta_min: vals[2],
            theta_max: vals[3],
        };
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("SGSPEC_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let cli = Cli::parse();
    let (verb, args) = match &cli.command {
        Command::Spectrum(a) => (Verb::Spectrum, a),
        Command::Count(a) => (Verb::Count, a),
        Command::Prufer(a) => (Verb::Pruefer, a),
        Command::Verify(a) => (Verb::Verify, a),
    };

    let mut config = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{{\"stage\":\"config\",\"error\":{:?}}}", e.to_string());
            return ExitCode::from(1);
        }
    };
    if let Err(e) = apply_overrides(&mut config, args) {
        eprintln!("{{\"stage\":\"config\",\"error\":{e:?}}}");
        return ExitCode::from(1);
    }

    let outcome = driver::run(verb, &config);
    println!("{}", outcome.summary);
    for artifact in &outcome.artifacts {
        println!("wrote {}", artifact.display());
    }
    ExitCode::from(outcome.exit_code as u8)
}
