//! Jost solutions, Wronskian, and transfer matrices for the 2×2 quadratic
//! pencil
//!
//!   Φ_x = (1/4)(z − 1/z) cos(u/2) τ₁ Φ + (1/4)(z + 1/z) sin(u/2) τ₂ Φ
//!
//! with τ₁ = diag(−i, i), τ₂ = antidiag(i, i), τ₃ = [[0,1],[−1,0]].
//!
//! Integration runs in factored variables w = Ω(x)⁻¹Φ with
//! Ω(x) = exp(θ(x) τ₁), θ(x) = (1/4)(z − 1/z) ω(x), ω(x) = ∫₀ˣ cos(u/2) dy,
//! which removes the exponential growth/decay of the raw solutions.  The
//! Wronskian is invariant under the factoring (det Ω = 1), so it is read off
//! directly from the factored components at the matching point.

use crate::numerics::quad;
use crate::numerics::rk::{self, DenseSolution, OdeOptions};
use crate::potentials::PotentialProfile;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral parameters with |z| below this must be reached through the
/// z → 1/z symmetry: the 1/z coefficient makes the system needlessly stiff.
pub const MIN_MODULUS: f64 = 0.05;

/// Acceptance threshold for |W(z)| / scale at an eigenvalue.
pub const EIGENVALUE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error("z = 0 is excluded: the pencil is singular there")]
    ZeroSpectralParameter,
    #[error("|z| = {0:.4} is below {MIN_MODULUS}; use the z -> 1/z symmetry instead")]
    NearZeroZ(f64),
    #[error("Im(z) = {0:.4e} < 0: only the closed upper half plane is integrated")]
    LowerHalfPlane(f64),
    #[error("integration failed: {0}")]
    StepFailure(#[from] rk::OdeError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] quad::QuadError),
    #[error("not an eigenvalue: |W| = {residual:.3e} exceeds {threshold:.3e}")]
    NotAnEigenvalue { residual: f64, threshold: f64 },
    #[error("Jost solutions are not proportional at the matching point (component ratios differ by {mismatch:.3e})")]
    InconsistentJost { mismatch: f64 },
    #[error("closed-form dW/dz requires |z| = 1, got |z| = {0:.6}")]
    OffCircle(f64),
}

/// Complex z with cached polar form; z = 0 is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    z: Complex64,
    r: f64,
    theta: f64,
}

impl SpectralParameter {
    pub fn new(z: Complex64) -> Result<Self, ScatteringError> {
        let r = z.norm();
        if r == 0.0 || !r.is_finite() {
            return Err(ScatteringError::ZeroSpectralParameter);
        }
        let mut theta = z.arg();
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        Ok(SpectralParameter { z, r, theta })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self, ScatteringError> {
        Self::new(Complex64::from_polar(r, theta))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Argument in [0, 2π).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn recip(&self) -> Self {
        Self::new(self.z.inv()).expect("1/z finite for z != 0")
    }

    /// Reflection across the imaginary axis; stays in the UHP.
    pub fn neg_conj(&self) -> Self {
        Self::new(-self.z.conj()).expect("nonzero")
    }

    /// Reflection across the unit circle composed with conjugation; stays in
    /// the UHP.
    pub fn recip_conj(&self) -> Self {
        Self::new(self.z.conj().inv()).expect("nonzero")
    }

    pub fn on_circle(&self, tol: f64) -> bool {
        (self.r - 1.0).abs() < tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JostSide {
    /// Normalized at x → −∞ (Ψ in the matching condition).
    Left,
    /// Normalized at x → +∞ (Φ).
    Right,
}

/// Sampled factored Jost solution on the truncated grid, with the ω
/// accumulator needed to reconstruct the raw solution.
#[derive(Debug, Clone)]
pub struct JostTrajectory {
    pub side: JostSide,
    pub z: SpectralParameter,
    /// Increasing sample positions (accepted integrator steps).
    pub grid: Vec<f64>,
    /// Factored components w = Ω⁻¹Φ at each grid point.
    pub values: Vec<[Complex64; 2]>,
    /// ω(x) = ∫₀ˣ cos(u/2) dy at each grid point.
    pub omega: Vec<f64>,
    /// Boundary vector the factored solution is pinned to.
    pub normalization: [Complex64; 2],
    dense: DenseSolution<5>,
}

impl JostTrajectory {
    pub fn factored_at(&self, x: f64) -> ([Complex64; 2], f64) {
        let y = self.dense.eval(x);
        (unpack(&y), y[4])
    }

    /// Raw solution Φ(x) = Ω(x) w(x).
    pub fn raw_at(&self, x: f64) -> [Complex64; 2] {
        let (w, om) = self.factored_at(x);
        let a = 0.25 * (self.z.z() - self.z.z().inv());
        let th = a * om;
        [(-I * th).exp() * w[0], (I * th).exp() * w[1]]
    }

    /// Raw derivative Φ′(x) straight from the pencil right-hand side.
    pub fn raw_deriv_at(&self, x: f64, p: &PotentialProfile) -> [Complex64; 2] {
        rhs_value(x, &self.z, self.raw_at(x), p)
    }

    /// Distance of the factored solution from its boundary vector at the
    /// truncation boundary it was launched from.
    pub fn boundary_residual(&self) -> f64 {
        let x = match self.side {
            JostSide::Left => self.grid[0],
            JostSide::Right => *self.grid.last().unwrap(),
        };
        let (w, _) = self.factored_at(x);
        ((w[0] - self.normalization[0]).norm_sqr() + (w[1] - self.normalization[1]).norm_sqr())
            .sqrt()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }
}

/// 2×2 fundamental solution matrix of the pencil over `interval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[Complex64; 2]; 2],
    pub interval: (f64, f64),
}

impl TransferMatrix {
    pub fn identity(interval: (f64, f64)) -> Self {
        TransferMatrix {
            entries: [[ONE, ZERO], [ZERO, ONE]],
            interval,
        }
    }

    pub fn det(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Composition other ∘ self: first cross `self.interval`, then `other`.
    pub fn then(&self, other: &TransferMatrix) -> TransferMatrix {
        let a = &other.entries;
        let b = &self.entries;
        let mut e = [[ZERO; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                e[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        TransferMatrix {
            entries: e,
            interval: (self.interval.0, other.interval.1),
        }
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.entries[0][0] * v[0] + self.entries[0][1] * v[1],
            self.entries[1][0] * v[0] + self.entries[1][1] * v[1],
        ]
    }
}

/// Right-hand side of the pencil in raw variables.
///
/// u_t ≡ 0 throughout: only the τ₁ and τ₂ terms appear.
pub fn rhs(
    x: f64,
    z: &SpectralParameter,
    v: [Complex64; 2],
    p: &PotentialProfile,
) -> [Complex64; 2] {
    rhs_value(x, z, v, p)
}

fn rhs_value(
    x: f64,
    z: &SpectralParameter,
    v: [Complex64; 2],
    p: &PotentialProfile,
) -> [Complex64; 2] {
    let zc = z.z();
    let a = 0.25 * (zc - zc.inv());
    let b = 0.25 * (zc + zc.inv());
    let c = p.cos_half(x);
    let s = p.sin_half(x);
    // τ₁ contributes diag(−i, i)·a·c; τ₂ swaps with factor i·b·s
    [
        -I * a * c * v[0] + I * b * s * v[1],
        I * b * s * v[0] + I * a * c * v[1],
    ]
}

/// exp(e) * w with a log-sum path once the bare exponential would overflow.
#[inline]
fn exp_mul(e: Complex64, w: Complex64) -> Complex64 {
    if e.re.abs() < 600.0 {
        e.exp() * w
    } else if w == ZERO {
        ZERO
    } else {
        let total = e + Complex64::new(w.norm().ln(), w.arg());
        if total.re < -745.0 {
            ZERO
        } else {
            total.exp()
        }
    }
}

/// Boundary vector of the factored solution; the decaying component at each
/// end is selected by the parity of the asymptotic winding integer.
pub fn normalization_vector(side: JostSide, p: &PotentialProfile) -> [Complex64; 2] {
    let e1 = [ONE, ZERO];
    let e2 = [ZERO, ONE];
    match side {
        JostSide::Left => {
            if p.k_minus.rem_euclid(2) == 0 {
                e1
            } else {
                e2
            }
        }
        JostSide::Right => {
            if p.k_plus.rem_euclid(2) == 1 {
                e1
            } else {
                e2
            }
        }
    }
}

fn check_z(z: &SpectralParameter) -> Result<(), ScatteringError> {
    if z.r() < MIN_MODULUS {
        return Err(ScatteringError::NearZeroZ(z.r()));
    }
    if z.z().im < -1e-12 {
        return Err(ScatteringError::LowerHalfPlane(z.z().im));
    }
    Ok(())
}

fn omega_at(p: &PotentialProfile, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    quad::integrate(|y| p.cos_half(y), 0.0, x, p.breakpoints(), 1e-12)
        .map(|r| r.value)
        .unwrap_or_else(|_| {
            // fall back to a looser target; cos(u/2) is bounded by 1
            quad::integrate_smooth(|y| p.cos_half(y), 0.0, x, 1e-9)
        })
}

struct FactoredRun {
    sol: DenseSolution<5>,
    x_from: f64,
}

fn run_factored(
    side: JostSide,
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
    x_stop: f64,
    record_dense: bool,
) -> Result<FactoredRun, ScatteringError> {
    let (x_min, x_max) = p.domain();
    let (x_from, _dir) = match side {
        JostSide::Left => (x_min, 1.0),
        JostSide::Right => (x_max, -1.0),
    };
    let zc = z.z();
    let a = 0.25 * (zc - zc.inv());
    let b = 0.25 * (zc + zc.inv());
    let v = normalization_vector(side, p);
    let om0 = omega_at(p, x_from);
    let y0 = [v[0].re, v[0].im, v[1].re, v[1].im, om0];

    let f = |x: f64, y: &[f64; 5], dy: &mut [f64; 5]| {
        let w1 = Complex64::new(y[0], y[1]);
        let w2 = Complex64::new(y[2], y[3]);
        let s = p.sin_half(x);
        let c = p.cos_half(x);
        let coef = I * b * s;
        let e = 2.0 * I * a * y[4];
        let d1 = coef * exp_mul(e, w2);
        let d2 = coef * exp_mul(-e, w1);
        dy[0] = d1.re;
        dy[1] = d1.im;
        dy[2] = d2.re;
        dy[3] = d2.im;
        dy[4] = c;
    };

    let mut opts = OdeOptions::with_tol(tol).checkpoints(p.breakpoints());
    opts.record_dense = record_dense;
    let sol = rk::integrate(f, x_from, x_stop, y0, &opts)?;
    Ok(FactoredRun { sol, x_from })
}

/// Integrate the Jost solution across the whole truncated domain.
pub fn integrate_jost(
    side: JostSide,
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
) -> Result<JostTrajectory, ScatteringError> {
    check_z(z)?;
    let (x_min, x_max) = p.domain();
    let x_stop = match side {
        JostSide::Left => x_max,
        JostSide::Right => x_min,
    };
    let run = run_factored(side, z, p, tol, x_stop, true)?;
    let mut grid: Vec<f64> = run.sol.steps.iter().map(|s| s.x0).collect();
    grid.push(run.sol.x_end);
    let mut states: Vec<[f64; 5]> = run.sol.steps.iter().map(|s| s.y0).collect();
    states.push(run.sol.y_end);
    if matches!(side, JostSide::Right) {
        grid.reverse();
        states.reverse();
    }
    let values = states.iter().map(unpack).collect();
    let omega = states.iter().map(|y| y[4]).collect();
    Ok(JostTrajectory {
        side,
        z: *z,
        grid,
        values,
        omega,
        normalization: normalization_vector(side, p),
        dense: run.sol,
    })
}

fn unpack(y: &[f64; 5]) -> [Complex64; 2] {
    [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])]
}

/// W(Ψ, Φ) = ψ₁φ₂ − ψ₂φ₁ at the profile's matching point.
pub fn wronskian(
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
) -> Result<Complex64, ScatteringError> {
    wronskian_at(z, p, tol, p.matching_point())
}

/// Same, evaluated by matching at an arbitrary interior point; the result is
/// x_m-independent up to integration error.
pub fn wronskian_at(
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
    x_m: f64,
) -> Result<Complex64, ScatteringError> {
    check_z(z)?;
    let left = run_factored(JostSide::Left, z, p, tol, x_m, false)?;
    let right = run_factored(JostSide::Right, z, p, tol, x_m, false)?;
    let wl = unpack(&left.sol.y_end);
    let wr = unpack(&right.sol.y_end);
    // det Ω = 1, so the factored components give W directly
    Ok(wl[0] * wr[1] - wl[1] * wr[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivMethod {
    /// On-circle eigenvalue formula built from the eigenfunction integrals.
    CircleClosedForm,
    /// Cauchy-integral differentiation on a small ring around z.
    ContourRing,
}

#[derive(Debug, Clone, Copy)]
pub struct WronskianDerivative {
    pub value: Complex64,
    pub method: DerivMethod,
}

/// dW/dz.  At a unit-circle eigenvalue the closed form is used; elsewhere a
/// 16-point Cauchy ring.
pub fn wronskian_derivative(
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
) -> Result<WronskianDerivative, ScatteringError> {
    if z.on_circle(1e-6) {
        if let Ok(eig) = Eigenfunction::assemble(z, p, tol) {
            return Ok(WronskianDerivative {
                value: wronskian_derivative_closed(&eig, p)?,
                method: DerivMethod::CircleClosedForm,
            });
        }
    }
    Ok(WronskianDerivative {
        value: wronskian_derivative_ring(z, p, tol)?,
        method: DerivMethod::ContourRing,
    })
}

/// Cauchy-ring derivative: W′(z) = (1/2πh) Σ W(z + h e^{iφ}) e^{−iφ} · (2π/M).
pub fn wronskian_derivative_ring(
    z: &SpectralParameter,
    p: &PotentialProfile,
    tol: f64,
) -> Result<Complex64, ScatteringError> {
    check_z(z)?;
    let zc = z.z();
    let h = 0.02f64
        .min(0.45 * zc.im.max(1e-3))
        .min(0.45 * (z.r() - MIN_MODULUS).max(1e-3));
    const M: usize = 16;
    let mut acc = ZERO;
    for j in 0..M {
        let phi = 2.0 * PI * j as f64 / M as f64;
        let zeta = zc + h * Complex64::from_polar(1.0, phi);
        let w = wronskian(&SpectralParameter::new(zeta)?, p, tol)?;
        acc += w * Complex64::from_polar(1.0, -phi);
    }
    Ok(acc / (M as f64 * h))
}

/// Closed-form Ẇ at a located circle eigenvalue:
/// Ẇ = (1/(2 z C)) ∫ [ sinθ sin(u/2)(ψ₁² − ψ₂²) − 2i cosθ cos(u/2) ψ₁ψ₂ ] dx
/// with Ψ = C·Φ the left Jost solution.
pub fn wronskian_derivative_closed(
    eig: &Eigenfunction,
    p: &PotentialProfile,
) -> Result<Complex64, ScatteringError> {
    if !eig.z.on_circle(1e-6) {
        return Err(ScatteringError::OffCircle(eig.z.r()));
    }
    let th = eig.z.theta();
    let (sin_t, cos_t) = (th.sin(), th.cos());
    let f_re = |x: f64| {
        let psi = eig.left_scaled_at(x);
        let s = p.sin_half(x);
        let c = p.cos_half(x);
        let v = sin_t * s * (psi[0] * psi[0] - psi[1] * psi[1])
            - 2.0 * I * cos_t * c * psi[0] * psi[1];
        v.re
    };
    let f_im = |x: f64| {
        let psi = eig.left_scaled_at(x);
        let s = p.sin_half(x);
        let c = p.cos_half(x);
        let v = sin_t * s * (psi[0] * psi[0] - psi[1] * psi[1])
            - 2.0 * I * cos_t * c * psi[0] * psi[1];
        v.im
    };
    let (a, b) = p.domain();
    let target = 1e-10 * eig.amplitude_scale().powi(2).max(1e-6);
    let re = quad::integrate(f_re, a, b, &[eig.matching_x], target)?.value;
    let im = quad::integrate(f_im, a, b, &[eig.matching_x], target)?.value;
    let integral = Complex64::new(re, im);
    Ok(integral / (2.0 * eig.z.z() * eig.ratio))
}

/// Fundamental solution matrix of the pencil from a to b in raw variables.
pub fn transfer_matrix(
    z: &SpectralParameter,
    p: &PotentialProfile,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<TransferMatrix, ScatteringError> {
    if z.r() == 0.0 {
        return Err(ScatteringError::ZeroSpectralParameter);
    }
    if a == b {
        return Ok(TransferMatrix::identity((a, b)));
    }
    let zc = z.z();
    let ca = 0.25 * (zc - zc.inv());
    let cb = 0.25 * (zc + zc.inv());
    let f = |x: f64, y: &[f64; 8], dy: &mut [f64; 8]| {
        let s = p.sin_half(x);
        let c = p.cos_half(x);
        for col in 0..2 {
            let v1 = Complex64::new(y[4 * col], y[4 * col + 1]);
            let v2 = Complex64::new(y[4 * col + 2], y[4 * col + 3]);
            let d1 = -I * ca * c * v1 + I * cb * s * v2;
            let d2 = I * cb * s * v1 + I * ca * c * v2;
            dy[4 * col] = d1.re;
            dy[4 * col + 1] = d1.im;
            dy[4 * col + 2] = d2.re;
            dy[4 * col + 3] = d2.im;
        }
    };
    let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let opts = OdeOptions::with_tol(tol).checkpoints(p.breakpoints());
    let sol = rk::integrate(f, a, b, y0, &opts)?;
    let y = sol.y_end;
    Ok(TransferMatrix {
        // columns are the propagated basis vectors
        entries: [
            [Complex64::new(y[0], y[1]), Complex64::new(y[4], y[5])],
            [Complex64::new(y[2], y[3]), Complex64::new(y[6], y[7])],
        ],
        interval: (a, b),
    })
}

/// Matched eigenfunction: left Jost on [x_min, x_m], ratio·(right Jost) on
/// [x_m, x_max], normalized to unit L² with φ₁(x_m) rotated onto ℝ₊.
pub struct Eigenfunction {
    pub z: SpectralParameter,
    pub matching_x: f64,
    pub ratio: Complex64,
    pub residual: f64,
    left: JostTrajectory,
    right: JostTrajectory,
    norm: f64,
    phase: Complex64,
    scale_raw: f64,
}

impl Eigenfunction {
    pub fn assemble(
        z: &SpectralParameter,
        p: &PotentialProfile,
        tol: f64,
    ) -> Result<Self, ScatteringError> {
        Self::assemble_with_threshold(z, p, tol, EIGENVALUE_RESIDUAL * 100.0)
    }

    pub fn assemble_with_threshold(
        z: &SpectralParameter,
        p: &PotentialProfile,
        tol: f64,
        threshold: f64,
    ) -> Result<Self, ScatteringError> {
        check_z(z)?;
        let xm = p.matching_point();
        let (x_min, x_max) = p.domain();
        let left = {
            let run = run_factored(JostSide::Left, z, p, tol, xm, true)?;
            trajectory_from_run(JostSide::Left, z, p, run)
        };
        let right = {
            let run = run_factored(JostSide::Right, z, p, tol, xm, true)?;
            trajectory_from_run(JostSide::Right, z, p, run)
        };
        let wl = left.factored_at(xm).0;
        let wr = right.factored_at(xm).0;
        let w = wl[0] * wr[1] - wl[1] * wr[0];
        let scale = (wl[0].norm_sqr() + wl[1].norm_sqr()).sqrt()
            * (wr[0].norm_sqr() + wr[1].norm_sqr()).sqrt();
        let residual = w.norm() / scale.max(1e-300);
        if residual > threshold {
            return Err(ScatteringError::NotAnEigenvalue {
                residual,
                threshold,
            });
        }
        // proportionality constant from the dominant component
        let ratio = if wr[0].norm() >= wr[1].norm() {
            wl[0] / wr[0]
        } else {
            wl[1] / wr[1]
        };
        // the component-ratio comparison is only conditioned when both
        // components carry a meaningful share of their vector
        let nl = (wl[0].norm_sqr() + wl[1].norm_sqr()).sqrt();
        let nr = (wr[0].norm_sqr() + wr[1].norm_sqr()).sqrt();
        let mismatch = if wr[0].norm() > 1e-4 * nr
            && wr[1].norm() > 1e-4 * nr
            && wl[0].norm() > 1e-4 * nl
            && wl[1].norm() > 1e-4 * nl
        {
            (wl[0] / wr[0] - wl[1] / wr[1]).norm() / ratio.norm().max(1e-300)
        } else {
            0.0
        };

        let mut eig = Eigenfunction {
            z: *z,
            matching_x: xm,
            ratio,
            residual,
            left,
            right,
            norm: 1.0,
            phase: ONE,
            scale_raw: 1.0,
        };
        if mismatch > 1e-4 {
            return Err(ScatteringError::InconsistentJost { mismatch });
        }

        // amplitude scale for quadrature targets
        let mut amp: f64 = 0.0;
        for x in [x_min, 0.5 * (x_min + xm), xm, 0.5 * (xm + x_max), x_max] {
            let v = eig.left_scaled_at(x);
            amp = amp.max(v[0].norm()).max(v[1].norm());
        }
        eig.scale_raw = amp.max(1e-300);

        let n2 = quad::integrate(
            |x| {
                let v = eig.left_scaled_at(x);
                v[0].norm_sqr() + v[1].norm_sqr()
            },
            x_min,
            x_max,
            &[xm],
            1e-10 * eig.scale_raw.powi(2).max(1.0),
        )?
        .value;
        eig.norm = n2.sqrt();
        let v_m = eig.left_scaled_at(xm);
        let anchor = if v_m[0].norm() > 1e-8 * eig.scale_raw {
            v_m[0]
        } else {
            // kink eigenfunctions can have φ₁ ≡ 0; fall back to −iφ₂
            -I * v_m[1]
        };
        eig.phase = (anchor / anchor.norm()).conj();
        Ok(eig)
    }

    /// Raw values in the scaling of the left Jost solution.
    pub fn left_scaled_at(&self, x: f64) -> [Complex64; 2] {
        if x <= self.matching_x {
            self.left.raw_at(x)
        } else {
            let v = self.right.raw_at(x);
            [self.ratio * v[0], self.ratio * v[1]]
        }
    }

    /// Unit-L², phase-aligned eigenfunction value.
    pub fn eval(&self, x: f64) -> [Complex64; 2] {
        let v = self.left_scaled_at(x);
        let c = self.phase / self.norm;
        [c * v[0], c * v[1]]
    }

    pub fn eval_deriv(&self, x: f64, p: &PotentialProfile) -> [Complex64; 2] {
        rhs_value(x, &self.z, self.eval(x), p)
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.scale_raw
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.left.span().0, self.right.span().1)
    }

    /// Max deviation from the circle realness structure: after phase
    /// alignment φ₁ should be real and φ₂ purely imaginary.
    pub fn phase_alignment_residual(&self) -> f64 {
        let (a, b) = self.domain();
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let x = a + (b - a) * i as f64 / 200.0;
            let v = self.eval(x);
            worst = worst.max(v[0].im.abs()).max(v[1].re.abs());
        }
        worst
    }
}

fn trajectory_from_run(
    side: JostSide,
    z: &SpectralParameter,
    p: &PotentialProfile,
    run: FactoredRun,
) -> JostTrajectory {
    let mut grid: Vec<f64> = run.sol.steps.iter().map(|s| s.x0).collect();
    grid.push(run.sol.x_end);
    let mut states: Vec<[f64; 5]> = run.sol.steps.iter().map(|s| s.y0).collect();
    states.push(run.sol.y_end);
    if matches!(side, JostSide::Right) {
        grid.reverse();
        states.reverse();
    }
    let _ = run.x_from;
    JostTrajectory {
        side,
        z: *z,
        grid,
        values: states.iter().map(unpack).collect(),
        omega: states.iter().map(|y| y[4]).collect(),
        normalization: normalization_vector(side, p),
        dense: run.sol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{KinkShape, PotentialProfile};

    fn zero_potential() -> PotentialProfile {
        PotentialProfile::from_closures(|_| 0.0, |_| 0.0, Some((-8.0, 8.0)), "zero").unwrap()
    }

    #[test]
    fn rhs_at_z_i_and_zero_potential() {
        // z = i: z − 1/z = 2i, z + 1/z = 0 ⇒ rhs = diag(1/2, −1/2) v
        let p = zero_potential();
        let z = SpectralParameter::new(I).unwrap();
        let v = [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2)];
        let d = rhs(0.0, &z, v, &p);
        assert!((d[0] - 0.5 * v[0]).norm() < 1e-15);
        assert!((d[1] + 0.5 * v[1]).norm() < 1e-15);
    }

    #[test]
    fn rhs_at_z_one_u_pi() {
        // u = π, z = 1: rhs = (1/2) τ₂ v = antidiag(i/2, i/2) v
        let p = PotentialProfile::klaus_shaw_breather(3.0, 2.0).unwrap();
        // find a point where u is close to π is unnecessary: construct directly
        let q = PotentialProfile::from_closures(
            |x: f64| std::f64::consts::PI * (-x * x).exp(),
            |x: f64| -2.0 * x * std::f64::consts::PI * (-x * x).exp(),
            None,
            "gauss-pi",
        )
        .unwrap();
        drop(p);
        let z = SpectralParameter::new(ONE).unwrap();
        let v = [Complex64::new(1.0, 0.5), Complex64::new(-0.25, 2.0)];
        let d = rhs(0.0, &z, v, &q);
        assert!((d[0] - 0.5 * I * v[1]).norm() < 1e-13);
        assert!((d[1] - 0.5 * I * v[0]).norm() < 1e-13);
    }

    #[test]
    fn rhs_matches_expanded_scalar_formulas() {
        // independent route: real/imaginary parts expanded by hand
        let p = PotentialProfile::klaus_shaw_breather(1.2, 1.4).unwrap();
        let z = SpectralParameter::new(Complex64::new(0.63, 0.55)).unwrap();
        let v = [Complex64::new(0.2, -0.9), Complex64::new(-1.4, 0.3)];
        let x = 0.37;
        let d = rhs(x, &z, v, &p);

        let zc = z.z();
        let (ar, ai) = {
            let t = 0.25 * (zc - zc.inv());
            (t.re, t.im)
        };
        let (br, bi) = {
            let t = 0.25 * (zc + zc.inv());
            (t.re, t.im)
        };
        let c = p.cos_half(x);
        let s = p.sin_half(x);
        let (v1r, v1i, v2r, v2i) = (v[0].re, v[0].im, v[1].re, v[1].im);
        // d1 = -i(ar+i ai)c v1 + i(br+i bi)s v2
        let d1r = c * (ar * v1i + ai * v1r) - s * (br * v2i + bi * v2r);
        let d1i = c * (ai * v1i - ar * v1r) + s * (br * v2r - bi * v2i);
        let d2r = -s * (br * v1i + bi * v1r) - c * (ar * v2i + ai * v2r);
        let d2i = s * (br * v1r - bi * v1i) + c * (ar * v2r - ai * v2i);
        assert!((d[0] - Complex64::new(d1r, d1i)).norm() < 1e-15);
        assert!((d[1] - Complex64::new(d2r, d2i)).norm() < 1e-15);
    }

    #[test]
    fn zero_potential_left_jost_is_constant() {
        let p = zero_potential();
        let z = SpectralParameter::new(Complex64::new(0.4, 0.8)).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, 1e-11).unwrap();
        for &x in &[-8.0, -3.0, 0.0, 5.5, 8.0] {
            let (w, _) = t.factored_at(x);
            assert!((w[0] - ONE).norm() < 1e-12, "w1 at {x}");
            assert!(w[1].norm() < 1e-12, "w2 at {x}");
        }
        assert!(t.boundary_residual() < 1e-12);
    }

    #[test]
    fn zero_potential_has_no_eigenvalues() {
        let p = zero_potential();
        for zc in [
            Complex64::new(0.0, 1.0),
            Complex64::new(0.5, 0.5),
            Complex64::new(-0.9, 0.3),
            Complex64::new(2.0, 2.0),
        ] {
            let z = SpectralParameter::new(zc).unwrap();
            let w = wronskian(&z, &p, 1e-11).unwrap();
            assert!(w.norm() > 0.5, "W({zc}) = {w}");
        }
    }

    #[test]
    fn kink_closed_form_at_z_i() {
        // φ₂ stays zero and raw φ₁ = exp(½∫₀ˣ cos(u/2))
        let p = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        let z = SpectralParameter::new(I).unwrap();
        let t = integrate_jost(JostSide::Left, &z, &p, 1e-11).unwrap();
        for &x in &[-5.0, -1.0, 0.0, 1.5, 4.0] {
            let raw = t.raw_at(x);
            let expected = quad::integrate_smooth(|y| p.cos_half(y), 0.0, x, 1e-12);
            let want = (0.5 * expected).exp();
            assert!(
                (raw[0].norm() - want).abs() < 1e-9 * want.max(1.0),
                "phi1 at {x}: {} vs {want}",
                raw[0].norm()
            );
            assert!(raw[1].norm() < 1e-9, "phi2 at {x}: {}", raw[1].norm());
        }
    }

    #[test]
    fn buckingham_miller_eigenvalue_at_i() {
        let p = PotentialProfile::buckingham_miller();
        let z = SpectralParameter::new(I).unwrap();
        let w = wronskian(&z, &p, 1e-11).unwrap();
        assert!(w.norm() < 1e-8, "|W(i)| = {}", w.norm());
        // nearby points are not eigenvalues
        let z2 = SpectralParameter::new(Complex64::new(0.1, 0.9)).unwrap();
        assert!(wronskian(&z2, &p, 1e-11).unwrap().norm() > 1e-3);
    }

    #[test]
    fn wronskian_matching_point_independence() {
        let p = PotentialProfile::klaus_shaw_breather(1.0, 1.5).unwrap();
        let z = SpectralParameter::new(Complex64::new(0.55, 0.35)).unwrap();
        let w1 = wronskian_at(&z, &p, 1e-11, -1.0).unwrap();
        let w2 = wronskian_at(&z, &p, 1e-11, 2.0).unwrap();
        assert!(
            (w1 - w2).norm() < 1e-8 * w1.norm().max(1.0),
            "{w1} vs {w2}"
        );
    }

    #[test]
    fn near_zero_z_is_rejected() {
        let p = zero_potential();
        let z = SpectralParameter::new(Complex64::new(0.0, 0.01)).unwrap();
        assert!(matches!(
            integrate_jost(JostSide::Left, &z, &p, 1e-10),
            Err(ScatteringError::NearZeroZ(_))
        ));
        assert!(SpectralParameter::new(ZERO).is_err());
    }

    #[test]
    fn transfer_matrix_zero_length_is_identity() {
        let p = zero_potential();
        let z = SpectralParameter::new(Complex64::new(0.3, 0.6)).unwrap();
        let m = transfer_matrix(&z, &p, 1.0, 1.0, 1e-10).unwrap();
        assert_eq!(m, TransferMatrix::identity((1.0, 1.0)));
    }

    #[test]
    fn transfer_matrix_determinant_is_constant() {
        // trace-free coefficient matrix: det M ≡ 1
        let p = PotentialProfile::klaus_shaw_breather(1.3, 1.1).unwrap();
        for zc in [Complex64::new(1.0, 0.0), Complex64::new(0.4, 0.9)] {
            let z = SpectralParameter::new(zc).unwrap();
            let m = transfer_matrix(&z, &p, -6.0, 6.0, 1e-11).unwrap();
            assert!((m.det() - ONE).norm() < 1e-9, "det = {}", m.det());
        }
    }

    #[test]
    fn spectral_parameter_polar_roundtrip() {
        let z = SpectralParameter::new(Complex64::new(-1.2, 0.7)).unwrap();
        let back = Complex64::from_polar(z.r(), z.theta());
        assert!((back - z.z()).norm() < 1e-14 * z.r());
        assert!(z.theta() >= 0.0 && z.theta() < 2.0 * PI);
    }

    #[test]
    fn eigenfunction_assembly_rejects_non_eigenvalue() {
        let p = PotentialProfile::buckingham_miller();
        let z = SpectralParameter::new(Complex64::new(0.3, 0.7)).unwrap();
        assert!(matches!(
            Eigenfunction::assemble(&z, &p, 1e-10),
            Err(ScatteringError::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn bm_eigenfunction_realness_structure() {
        let p = PotentialProfile::buckingham_miller();
        let z = SpectralParameter::new(I).unwrap();
        let eig = Eigenfunction::assemble(&z, &p, 1e-11).unwrap();
        assert!(eig.phase_alignment_residual() < 1e-8);
        // unit L2 norm
        let (a, b) = eig.domain();
        let n2 = quad::integrate_smooth(
            |x| {
                let v = eig.eval(x);
                v[0].norm_sqr() + v[1].norm_sqr()
            },
            a,
            b,
            1e-10,
        );
        assert!((n2 - 1.0).abs() < 1e-7, "norm^2 = {n2}");
    }
}
