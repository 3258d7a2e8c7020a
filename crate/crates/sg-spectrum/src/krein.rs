//! Krein signatures, spectral-symmetry orbits, and flux-identity
//! diagnostics.
//!
//! For an eigenfunction Φ at z = r e^{iθ} the two signatures are
//!
//!   κ  = 2ir ( sinθ ∫ sin(u/2)|Φ|² − i cosθ ∫ cos(u/2)⟨Φ,τ₃Φ⟩ )
//!   κ̃  = (i/2)(r − 1/r) ∫ cos(u/2)⟨Φ,τ₂Φ⟩ − (i/2)(r + 1/r) ∫ sin(u/2)⟨Φ,τ₁Φ⟩.
//!
//! A nonzero κ pins the eigenvalue to the unit circle; a nonzero κ̃ pins it
//! to the imaginary axis.  The four pointwise flux identities obeyed by the
//! quadratic forms of any solution are re-integrated alongside a trajectory
//! as a consistency diagnostic: their residual measures integration error.

use crate::numerics::quad;
use crate::numerics::rk::{self, OdeOptions};
use crate::potentials::PotentialProfile;
use crate::scattering::{Eigenfunction, JostTrajectory, ScatteringError, SpectralParameter, I};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KreinError {
    #[error("scattering: {0}")]
    Scattering(#[from] ScatteringError),
    #[error("quadrature: {0}")]
    Quadrature(#[from] quad::QuadError),
    #[error("integration: {0}")]
    Ode(#[from] rk::OdeError),
}

/// The four bracket integrals entering both signatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketIntegrals {
    /// ∫ sin(u/2) |Φ|² dx (real).
    pub sin_abs2: Complex64,
    /// ∫ cos(u/2) ⟨Φ, τ₃Φ⟩ dx (purely imaginary).
    pub cos_tau3: Complex64,
    /// ∫ cos(u/2) ⟨Φ, τ₂Φ⟩ dx (purely imaginary).
    pub cos_tau2: Complex64,
    /// ∫ sin(u/2) ⟨Φ, τ₁Φ⟩ dx (purely imaginary).
    pub sin_tau1: Complex64,
}

/// Signature data attached to one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignatureReport {
    pub kappa_circle: Complex64,
    pub kappa_imag: Complex64,
    /// The real inner bracket sinθ∫sin(u/2)|Φ|² − icosθ∫cos(u/2)⟨Φ,τ₃Φ⟩.
    pub bracket: f64,
    pub integrals: BracketIntegrals,
    /// Bracket bounded away from zero after unit normalization.
    pub definite: bool,
}

/// Result of the circle-symmetry signature computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSignature {
    pub kappa: Complex64,
    /// The parenthesized real quantity whose positivity the confinement
    /// arguments bound.
    pub bracket: f64,
}

// quadratic forms of Φ; τ₁ = diag(−i, i), τ₂ = antidiag(i, i), τ₃ = [[0,1],[−1,0]]
fn form_abs2(v: &[Complex64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

fn form_tau1(v: &[Complex64; 2]) -> Complex64 {
    I * (v[1].norm_sqr() - v[0].norm_sqr())
}

fn form_tau2(v: &[Complex64; 2]) -> Complex64 {
    I * (v[0].conj() * v[1] + v[1].conj() * v[0])
}

fn form_tau3(v: &[Complex64; 2]) -> Complex64 {
    v[0].conj() * v[1] - v[1].conj() * v[0]
}

fn bracket_integrals(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<BracketIntegrals, KreinError> {
    let (a, b) = eig.domain();
    let knots = [eig.matching_x];
    let target = 1e-10;
    let sin_abs2 =
        quad::integrate(|x| p.sin_half(x) * form_abs2(&eig.eval(x)), a, b, &knots, target)?.value;
    let cos_tau3 =
        quad::integrate(|x| p.cos_half(x) * form_tau3(&eig.eval(x)).im, a, b, &knots, target)?
            .value;
    let cos_tau2 =
        quad::integrate(|x| p.cos_half(x) * form_tau2(&eig.eval(x)).im, a, b, &knots, target)?
            .value;
    let sin_tau1 =
        quad::integrate(|x| p.sin_half(x) * form_tau1(&eig.eval(x)).im, a, b, &knots, target)?
            .value;
    Ok(BracketIntegrals {
        sin_abs2: Complex64::new(sin_abs2, 0.0),
        cos_tau3: Complex64::new(0.0, cos_tau3),
        cos_tau2: Complex64::new(0.0, cos_tau2),
        sin_tau1: Complex64::new(0.0, sin_tau1),
    })
}

/// κ of the unit-circle symmetry, with the real inner bracket.
pub fn circle_signature(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<CircleSignature, KreinError> {
    let ints = bracket_integrals(eig, p)?;
    Ok(circle_signature_from(&ints, &eig.z))
}

fn circle_signature_from(ints: &BracketIntegrals, z: &SpectralParameter) -> CircleSignature {
    let theta = z.theta();
    let bracket = theta.sin() * ints.sin_abs2.re + theta.cos() * ints.cos_tau3.im;
    let kappa = 2.0 * I * z.r() * bracket;
    CircleSignature { kappa, bracket }
}

/// κ̃ of the imaginary-axis symmetry.
pub fn imag_axis_signature(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<Complex64, KreinError> {
    let ints = bracket_integrals(eig, p)?;
    Ok(imag_axis_signature_from(&ints, &eig.z))
}

fn imag_axis_signature_from(ints: &BracketIntegrals, z: &SpectralParameter) -> Complex64 {
    let r = z.r();
    0.5 * I * (r - 1.0 / r) * ints.cos_tau2 - 0.5 * I * (r + 1.0 / r) * ints.sin_tau1
}

/// Full signature report for a certified eigenvalue.
pub fn signature_report(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<SignatureReport, KreinError> {
    let ints = bracket_integrals(eig, p)?;
    let circle = circle_signature_from(&ints, &eig.z);
    let kappa_imag = imag_axis_signature_from(&ints, &eig.z);
    Ok(SignatureReport {
        kappa_circle: circle.kappa,
        kappa_imag,
        bracket: circle.bracket,
        integrals: ints,
        definite: circle.bracket > 1e-8,
    })
}

/// Max residuals of the four flux identities along a Jost trajectory,
/// normalized by the trajectory amplitude scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxResiduals {
    /// Residuals in the order ⟨τ₂⟩, ⟨τ₃⟩, |Φ|², ⟨τ₁⟩.
    pub residuals: [f64; 4],
    /// Max of |Φ|² along the trajectory grid.
    pub amplitude_scale: f64,
}

impl FluxResiduals {
    pub fn max_relative(&self) -> f64 {
        self.residuals
            .iter()
            .fold(0.0f64, |m, &r| m.max(r / self.amplitude_scale.max(1e-300)))
    }
}

/// Integrate the identity system
///
///   g₂′ = −(1/2)Re(z−1/z) C g₃ − (1/2)Im(z+1/z) S g₀
///   g₃′ =  (1/2)Re(z−1/z) C g₂ − (1/2)Re(z+1/z) S g₁
///   g₀′ = −(1/2)Im(z−1/z) C g₁ − (1/2)Im(z+1/z) S g₂
///   g₁′ = −(1/2)Im(z−1/z) C g₀ + (1/2)Re(z+1/z) S g₃
///
/// (g₀ = |Φ|², g₁ = −i⟨τ₁⟩, g₂ = −i⟨τ₂⟩, g₃ = −i⟨τ₃⟩) alongside the dense
/// trajectory and compare against the forms evaluated directly from Φ.  The
/// discrepancy is pure integration error.
pub fn flux_residuals(
    traj: &JostTrajectory,
    p: &PotentialProfile,
    tol: f64,
) -> Result<FluxResiduals, KreinError> {
    let zc = traj.z.z();
    let zz = zc - zc.inv();
    let zp = zc + zc.inv();
    let (re_zz, im_zz) = (zz.re, zz.im);
    let (re_zp, im_zp) = (zp.re, zp.im);

    let g_direct = |x: f64| -> [f64; 4] {
        let v = traj.raw_at(x);
        [
            form_tau2(&v).im,
            form_tau3(&v).im,
            form_abs2(&v),
            form_tau1(&v).im,
        ]
    };

    let (x0, x1) = traj.span();
    // launch from the trajectory's own boundary so the co-integration sees
    // the same initial data
    let (from, to) = match traj.side {
        crate::scattering::JostSide::Left => (x0, x1),
        crate::scattering::JostSide::Right => (x1, x0),
    };
    // the identity system is linear: rescale so the launch data is O(1),
    // otherwise the absolute error floor swamps a tiny boundary amplitude
    let y_raw = g_direct(from);
    let launch_scale = y_raw.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let y0 = [
        y_raw[0] / launch_scale,
        y_raw[1] / launch_scale,
        y_raw[2] / launch_scale,
        y_raw[3] / launch_scale,
    ];
    let f = |x: f64, y: &[f64; 4], dy: &mut [f64; 4]| {
        let c = p.cos_half(x);
        let s = p.sin_half(x);
        let (g2, g3, g0, g1) = (y[0], y[1], y[2], y[3]);
        dy[0] = -0.5 * re_zz * c * g3 - 0.5 * im_zp * s * g0;
        dy[1] = 0.5 * re_zz * c * g2 - 0.5 * re_zp * s * g1;
        dy[2] = -0.5 * im_zz * c * g1 - 0.5 * im_zp * s * g2;
        dy[3] = -0.5 * im_zz * c * g0 + 0.5 * re_zp * s * g3;
    };
    let opts = OdeOptions::with_tol(tol).checkpoints(p.breakpoints()).dense();
    let sol = rk::integrate(f, from, to, y0, &opts)?;

    let mut res = [0.0f64; 4];
    let mut amp: f64 = 0.0;
    for &x in &traj.grid {
        let direct = g_direct(x);
        let co = sol.eval(x);
        amp = amp.max(direct[2]);
        for k in 0..4 {
            res[k] = res[k].max((launch_scale * co[k] - direct[k]).abs());
        }
    }
    Ok(FluxResiduals {
        residuals: res,
        amplitude_scale: amp,
    })
}

/// Residual of the stationarity identity ∫φ₁*φ₁′ = ∫φ₂*φ₂′ at a circle
/// eigenvalue.
pub fn zero_momentum_check(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<Complex64, KreinError> {
    let (a, b) = eig.domain();
    let knots = [eig.matching_x];
    let part = |pick: usize, re: bool| {
        let f = move |x: f64| {
            let v = eig.eval(x);
            let d = eig.eval_deriv(x, p);
            let t = v[pick].conj() * d[pick];
            if re {
                t.re
            } else {
                t.im
            }
        };
        quad::integrate(f, a, b, &knots, 1e-10).map(|r| r.value)
    };
    let p1 = Complex64::new(part(0, true)?, part(0, false)?);
    let p2 = Complex64::new(part(1, true)?, part(1, false)?);
    Ok(p1 - p2)
}

/// How an eigenfunction transforms along a symmetry-orbit member:
/// Φ ↦ M · (Φ or Φ*).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionMap {
    pub matrix: [[Complex64; 2]; 2],
    pub conjugate: bool,
}

impl EigenfunctionMap {
    fn identity() -> Self {
        EigenfunctionMap {
            matrix: [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
            conjugate: false,
        }
    }

    /// Compose with a further transform applied after this one.
    fn then(&self, m: &[[Complex64; 2]; 2], conj: bool) -> Self {
        // if the outer map conjugates, it sees the conjugate of our matrix
        let inner = if conj {
            [
                [self.matrix[0][0].conj(), self.matrix[0][1].conj()],
                [self.matrix[1][0].conj(), self.matrix[1][1].conj()],
            ]
        } else {
            self.matrix
        };
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = m[r][0] * inner[0][c] + m[r][1] * inner[1][c];
            }
        }
        EigenfunctionMap {
            matrix: out,
            conjugate: self.conjugate ^ conj,
        }
    }

    pub fn apply(&self, v: &[Complex64; 2]) -> [Complex64; 2] {
        let w = if self.conjugate {
            [v[0].conj(), v[1].conj()]
        } else {
            *v
        };
        [
            self.matrix[0][0] * w[0] + self.matrix[0][1] * w[1],
            self.matrix[1][0] * w[0] + self.matrix[1][1] * w[1],
        ]
    }
}

/// One member of the Z₂×Z₂×Z₂ orbit of z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub z: Complex64,
    pub map: EigenfunctionMap,
}

/// The deduplicated orbit {z, 1/z, −z, z̄, −1/z, 1/z̄, −z̄, −1/z̄} with the
/// composed eigenfunction transforms (τ₂ for inversion, τ₃ for negation,
/// τ₃ ∘ conj for conjugation).
pub fn symmetry_orbit(z: &SpectralParameter) -> Vec<OrbitPoint> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let tau2 = [[zero, I], [I, zero]];
    let tau3 = [[zero, one], [-one, zero]];
    let z0 = z.z();
    let base = OrbitPoint {
        z: z0,
        map: EigenfunctionMap::identity(),
    };

    let mut points: Vec<OrbitPoint> = Vec::with_capacity(8);
    // generators applied in a fixed order: inversion, negation, conjugation
    for mask in 0u8..8 {
        let mut pt = base;
        if mask & 1 != 0 {
            pt = OrbitPoint {
                z: pt.z.inv(),
                map: pt.map.then(&tau2, false),
            };
        }
        if mask & 2 != 0 {
            pt = OrbitPoint {
                z: -pt.z,
                map: pt.map.then(&tau3, false),
            };
        }
        if mask & 4 != 0 {
            pt = OrbitPoint {
                z: pt.z.conj(),
                map: pt.map.then(&tau3, true),
            };
        }
        points.push(pt);
    }

    let mut out: Vec<OrbitPoint> = Vec::new();
    for pt in points {
        let dup = out
            .iter()
            .any(|q| (q.z - pt.z).norm() <= 1e-12 * pt.z.norm().max(1.0));
        if !dup {
            out.push(pt);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{KinkShape, PotentialProfile};
    use crate::scattering::{integrate_jost, JostSide};
    use std::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-11;

    #[test]
    fn orbit_of_i_has_two_points() {
        let z = SpectralParameter::new(I).unwrap();
        let orbit = symmetry_orbit(&z);
        assert_eq!(orbit.len(), 2);
        assert!(orbit.iter().any(|p| (p.z - I).norm() < 1e-14));
        assert!(orbit.iter().any(|p| (p.z + I).norm() < 1e-14));
    }

    #[test]
    fn orbit_on_circle_has_four_points() {
        let z = SpectralParameter::from_polar(1.0, PI / 6.0).unwrap();
        assert_eq!(symmetry_orbit(&z).len(), 4);
    }

    #[test]
    fn generic_orbit_has_eight_points() {
        let z = SpectralParameter::from_polar(0.8, PI / 5.0).unwrap();
        assert_eq!(symmetry_orbit(&z).len(), 8);
    }

    #[test]
    fn orbit_maps_transport_solutions() {
        // τ₂Φ(x) at 1/z must satisfy the pencil at 1/z; verify by finite
        // differences along an actual trajectory
        let p = PotentialProfile::klaus_shaw_breather(1.1, 1.2).unwrap();
        let z = SpectralParameter::new(Complex64::new(0.5, 0.6)).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, TOL).unwrap();
        let orbit = symmetry_orbit(&z);
        let inv = orbit
            .iter()
            .find(|q| (q.z - z.z().inv()).norm() < 1e-12)
            .unwrap();
        let x = 0.3;
        let h = 1e-5;
        let w = SpectralParameter::new(inv.z).unwrap();
        let vm = inv.map.apply(&t.raw_at(x - h));
        let v0 = inv.map.apply(&t.raw_at(x));
        let vp = inv.map.apply(&t.raw_at(x + h));
        let fd = [(vp[0] - vm[0]) / (2.0 * h), (vp[1] - vm[1]) / (2.0 * h)];
        let rhs = crate::scattering::rhs(x, &w, v0, &p);
        let scale = v0[0].norm().max(v0[1].norm());
        assert!(
            (fd[0] - rhs[0]).norm() < 1e-6 * scale && (fd[1] - rhs[1]).norm() < 1e-6 * scale,
            "mapped trajectory does not satisfy the pencil at 1/z: fd {fd:?} rhs {rhs:?}"
        );
    }

    #[test]
    fn flux_residuals_small_along_trajectories() {
        let p = PotentialProfile::klaus_shaw_breather(FRAC_PI_2, 1.5).unwrap();
        let z = SpectralParameter::new(Complex64::new(0.7, 0.5)).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, TOL).unwrap();
        let r = flux_residuals(&t, &p, TOL).unwrap();
        assert!(
            r.max_relative() < 1e-7,
            "flux residuals {:?} / scale {}",
            r.residuals,
            r.amplitude_scale
        );
    }

    #[test]
    fn flux_identity_abs2_on_circle_zero_potential() {
        // u ≡ 0 on the circle: |Φ|² is a pure exponential of the decay rate
        // and the amplitude identity is satisfied to interpolation accuracy
        let p =
            PotentialProfile::from_closures(|_| 0.0, |_| 0.0, Some((-6.0, 6.0)), "zero").unwrap();
        let z = SpectralParameter::from_polar(1.0, 0.7).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, 1e-12).unwrap();
        let r = flux_residuals(&t, &p, 1e-12).unwrap();
        assert!(
            r.residuals[2] < 1e-10 * r.amplitude_scale,
            "|Φ|² residual {} scale {}",
            r.residuals[2],
            r.amplitude_scale
        );
        // ω is referenced to x = 0, so |φ₁|² = exp(sinθ · x) exactly
        let rate = 0.7f64.sin();
        for &x in &[-5.0, 0.0, 5.0] {
            let v = t.raw_at(x);
            let expected = (rate * x).exp();
            assert!((form_abs2(&v) / expected - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn kink_signature_at_i_has_positive_bracket() {
        let p = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        let z = SpectralParameter::new(I).unwrap();
        let eig = Eigenfunction::assemble(&z, &p, TOL).unwrap();
        let sig = signature_report(&eig, &p).unwrap();
        // bracket reduces to ∫ sin(u/2)|Φ|² at θ = π/2
        assert!(sig.bracket > 1e-8, "bracket {}", sig.bracket);
        assert!(sig.definite);
        assert!(
            (sig.bracket - sig.integrals.sin_abs2.re).abs() < 1e-9,
            "θ=π/2 reduction"
        );
        // κ purely imaginary, κ̃ real
        assert!(sig.kappa_circle.re.abs() < 1e-10);
        assert!(sig.kappa_imag.im.abs() < 1e-10);
        // κ̃ degenerates to −i∫sin(u/2)⟨Φ,τ₁Φ⟩ at r = 1, θ = π/2
        let expected = (-I * sig.integrals.sin_tau1).re;
        assert!(
            (sig.kappa_imag.re - expected).abs() < 1e-9,
            "κ̃ {} vs degenerate form {}",
            sig.kappa_imag.re,
            expected
        );
    }

    #[test]
    fn kappa_imag_nonzero_only_on_axis_for_kink() {
        let p = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        let z = SpectralParameter::new(I).unwrap();
        let eig = Eigenfunction::assemble(&z, &p, TOL).unwrap();
        let kt = imag_axis_signature(&eig, &p).unwrap();
        if kt.norm() > 1e-6 {
            assert!(z.z().re.abs() < 1e-8, "κ̃ ≠ 0 off the imaginary axis");
        }
    }

    #[test]
    fn zero_momentum_residual_at_bm_eigenvalue() {
        let p = PotentialProfile::buckingham_miller();
        let z = SpectralParameter::new(I).unwrap();
        let eig = Eigenfunction::assemble(&z, &p, TOL).unwrap();
        let r = zero_momentum_check(&eig, &p).unwrap();
        assert!(r.norm() < 1e-7, "zero-momentum residual {}", r.norm());
    }

    #[test]
    fn flux_residual_scales_with_tolerance() {
        let p = PotentialProfile::klaus_shaw_breather(1.0, 1.3).unwrap();
        let z = SpectralParameter::new(Complex64::new(0.6, 0.55)).unwrap();
        let mut prev = f64::INFINITY;
        for tol in [1e-8, 1e-9, 1e-10] {
            let t = integrate_jost(JostSide::Left, &z, &p, tol).unwrap();
            let r = flux_residuals(&t, &p, tol).unwrap();
            let m = r.max_relative();
            assert!(m < prev * 1.2, "tol {tol}: residual {m} vs previous {prev}");
            prev = m;
        }
    }
}
