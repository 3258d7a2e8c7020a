//! Batch driver: potential construction → counting → search → verification,
//! with machine-readable artifacts on disk.
//!
//! Exit codes: 0 success, 1 configuration error, 2 verification failure.
//! Every failure is also emitted as a structured JSON diagnostic.

use crate::config::{ConfigError, RunConfig};
use crate::potentials::PotentialProfile;
use crate::pruefer::{self, CountReport, PrueferError};
use crate::report::{self, PotentialDescriptor, SpectrumDocument};
use crate::scattering::{integrate_jost, JostSide, SpectralParameter};
use crate::search::{self};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Spectrum,
    Count,
    Pruefer,
    Verify,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub stage: String,
    pub error: String,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub diagnostics: Vec<Diagnostic>,
    /// One-line human summary.
    pub summary: String,
}

fn fail(stage: &str, error: impl ToString, code: i32) -> RunOutcome {
    let d = Diagnostic {
        stage: stage.into(),
        error: error.to_string(),
    };
    eprintln!("{}", report::to_json_pretty(&d).trim_end());
    RunOutcome {
        exit_code: code,
        artifacts: Vec::new(),
        diagnostics: vec![d],
        summary: format!("{stage} failed"),
    }
}

fn count_report_any(p: &PotentialProfile, tol: f64) -> Result<CountReport, PrueferError> {
    match pruefer::count_exact(p, tol) {
        Ok(r) => Ok(r),
        Err(PrueferError::HypothesisNotMet(_)) => pruefer::count_lower_report(p, tol),
        Err(e) => Err(e),
    }
}

/// Execute one verb against a parsed configuration.
pub fn run(verb: Verb, config: &RunConfig) -> RunOutcome {
    let profile = match config.potential.build() {
        Ok(p) => p,
        Err(e) => return fail("potential", e, 1),
    };
    if let Err(e) = std::fs::create_dir_all(&config.out_dir) {
        return fail("output-dir", e, 1);
    }
    let mut artifacts = Vec::new();
    let tols = config.tolerances;

    let count = match count_report_any(&profile, tols.ode) {
        Ok(c) => c,
        Err(e) => return fail("count", e, 1),
    };
    if config.emit.count_json || matches!(verb, Verb::Count) {
        let path = config.out_dir.join("count.json");
        if let Err(e) = std::fs::write(&path, report::to_json_pretty(&count)) {
            return fail("write", e, 1);
        }
        artifacts.push(path);
    }

    if config.emit.prufer_csv || matches!(verb, Verb::Pruefer) {
        match emit_pruefer_curve(&profile, tols.ode, &config.out_dir) {
            Ok(path) => artifacts.push(path),
            Err(e) => return fail("prufer", e, 1),
        }
    }

    if matches!(verb, Verb::Count | Verb::Pruefer) {
        return RunOutcome {
            exit_code: 0,
            artifacts,
            diagnostics: Vec::new(),
            summary: format!(
                "count: lower bound {}, exact {:?}, angles {}",
                count.lower_bound,
                count.exact_count,
                count.circle_angles.len()
            ),
        };
    }

    // spectrum / verify: full search
    let points = match search::locate_eigenvalues(&config.region, &profile, &tols) {
        Ok(p) => p,
        Err(e) => return fail("search", e, 1),
    };
    let verification = match search::verify_spectrum(&points, &profile, &tols) {
        Ok(v) => v,
        Err(e) => return fail("verification", e, 1),
    };

    let doc = SpectrumDocument {
        potential: PotentialDescriptor::from_profile(&profile),
        count,
        points: points.clone(),
        verification: verification.clone(),
    };
    if config.emit.spectrum_json {
        let path = config.out_dir.join("spectrum.json");
        if let Err(e) = std::fs::write(&path, report::to_json_pretty(&doc)) {
            return fail("write", e, 1);
        }
        artifacts.push(path);
    }
    if config.emit.plane_scatter {
        let path = config.out_dir.join("scatter.csv");
        let mut buf = Vec::new();
        if let Err(e) = report::write_scatter_csv(&mut buf, &points) {
            return fail("write", e, 1);
        }
        if let Err(e) = std::fs::write(&path, buf) {
            return fail("write", e, 1);
        }
        artifacts.push(path);
    }
    if config.emit.trajectory_dump {
        for (k, pt) in points.iter().enumerate() {
            let z = match SpectralParameter::new(pt.z) {
                Ok(z) => z,
                Err(e) => return fail("trajectory", e, 1),
            };
            for (side, name) in [(JostSide::Left, "left"), (JostSide::Right, "right")] {
                match integrate_jost(side, &z, &profile, tols.ode) {
                    Ok(traj) => {
                        let path = config.out_dir.join(format!("trajectory_{k}_{name}.csv"));
                        let mut buf = Vec::new();
                        if let Err(e) = report::write_trajectory_csv(&mut buf, &traj) {
                            return fail("write", e, 1);
                        }
                        if let Err(e) = std::fs::write(&path, buf) {
                            return fail("write", e, 1);
                        }
                        artifacts.push(path);
                    }
                    Err(e) => return fail("trajectory", e, 1),
                }
            }
        }
    }

    let verified = verification.all_passed;
    let summary = format!(
        "{} eigenvalues located; verification {}",
        points.len(),
        if verified { "all-pass" } else { "FAILED" }
    );
    let exit_code = if matches!(verb, Verb::Verify) && !verified {
        let d = Diagnostic {
            stage: "verify".into(),
            error: format!(
                "failed checks: {}",
                verification
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect::<Vec<_>>()
                    .join("; ")
            ),
        };
        eprintln!("{}", report::to_json_pretty(&d).trim_end());
        2
    } else {
        0
    };
    RunOutcome {
        exit_code,
        artifacts,
        diagnostics: Vec::new(),
        summary,
    }
}

fn emit_pruefer_curve(
    profile: &PotentialProfile,
    tol: f64,
    out_dir: &std::path::Path,
) -> Result<PathBuf, ConfigError> {
    const SAMPLES: usize = 256;
    let thetas: Vec<f64> = (0..=SAMPLES)
        .map(|i| FRAC_PI_2 * i as f64 / SAMPLES as f64)
        .collect();
    let values = crate::par_map(thetas.clone(), |t| pruefer::pruefer_flow(t, profile, tol));
    let mut rows = Vec::with_capacity(values.len());
    for (t, v) in thetas.into_iter().zip(values) {
        let v = v.map_err(|e| ConfigError::Io(e.to_string()))?;
        rows.push((t, v));
    }
    let path = out_dir.join("prufer.csv");
    let mut buf = Vec::new();
    report::write_pruefer_csv(&mut buf, &rows).map_err(|e| ConfigError::Io(e.to_string()))?;
    std::fs::write(&path, buf).map_err(|e| ConfigError::Io(e.to_string()))?;
    Ok(path)
}
