//! Machine-readable result documents and plot-data writers.
//!
//! JSON floats go through serde's shortest-roundtrip formatting and reload
//! losslessly; CSV columns are emitted at 17 significant digits.

use crate::potentials::{HypothesisClass, PotentialProfile};
use crate::pruefer::CountReport;
use crate::scattering::JostTrajectory;
use crate::search::{SpectralPoint, VerificationReport};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDescriptor {
    pub label: String,
    pub charge: i64,
    pub k_minus: i64,
    pub k_plus: i64,
    pub domain: (f64, f64),
    pub class: HypothesisClass,
}

impl PotentialDescriptor {
    pub fn from_profile(p: &PotentialProfile) -> Self {
        PotentialDescriptor {
            label: p.label().to_string(),
            charge: p.charge(),
            k_minus: p.k_minus,
            k_plus: p.k_plus,
            domain: p.domain(),
            class: p.classify(),
        }
    }
}

/// The spectrum document written by the batch driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub potential: PotentialDescriptor,
    pub count: CountReport,
    pub points: Vec<SpectralPoint>,
    pub verification: VerificationReport,
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization is infallible");
    s.push('\n');
    s
}

/// CSV of (θ, L_η(θ)) samples.
pub fn write_pruefer_csv(
    mut w: impl Write,
    rows: &[(f64, f64)],
) -> std::io::Result<()> {
    writeln!(w, "theta,endpoint_angle")?;
    for (theta, l) in rows {
        writeln!(w, "{theta:.17e},{l:.17e}")?;
    }
    Ok(())
}

/// Complex-plane scatter rows for the located spectrum.
pub fn write_scatter_csv(mut w: impl Write, points: &[SpectralPoint]) -> std::io::Result<()> {
    writeln!(w, "re,im,on_circle,simple,residual,bracket")?;
    for p in points {
        writeln!(
            w,
            "{:.17e},{:.17e},{},{},{:.17e},{:.17e}",
            p.z.re, p.z.im, p.on_circle, p.simple, p.residual, p.signature.bracket
        )?;
    }
    Ok(())
}

/// Trajectory rows (x, Re φ₁, Im φ₁, Re φ₂, Im φ₂, ω).
pub fn write_trajectory_csv(mut w: impl Write, traj: &JostTrajectory) -> std::io::Result<()> {
    writeln!(w, "x,re_phi1,im_phi1,re_phi2,im_phi2,omega")?;
    for (i, &x) in traj.grid.iter().enumerate() {
        let raw = traj.raw_at(x);
        writeln!(
            w,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            x, raw[0].re, raw[0].im, raw[1].re, raw[1].im, traj.omega[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pruefer::{self};
    use crate::scattering::{integrate_jost, JostSide, SpectralParameter};
    use num_complex::Complex64;

    #[test]
    fn count_report_json_roundtrip() {
        let p = PotentialProfile::buckingham_miller();
        let report = pruefer::count_exact(&p, 1e-10).unwrap();
        let json = to_json_pretty(&report);
        let back: CountReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let p = PotentialProfile::buckingham_miller();
        let z = SpectralParameter::new(Complex64::new(0.0, 1.0)).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, 1e-9).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("x,re_phi1"));
        assert_eq!(lines.len(), t.grid.len() + 1);
    }
}
