//! Potential profiles u(x) for the stationary scattering problem.
//!
//! A profile carries the unwrapped field u, its derivative, the asymptotic
//! winding integers k∓ = u(∓∞)/2π, and a truncation window [x_min, x_max]
//! outside which both sin(u/2) and 1 − |cos(u/2)| are below 1e−12.  Profiles
//! are immutable and safe to share across threads.

use crate::numerics::{interp::CubicHermite, quad};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Endpoint decay demanded of every profile at its truncation boundary.
pub const TRUNCATION_EPS: f64 = 1e-12;
/// Absolute target for the profile quadratures.
pub const QUAD_TARGET: f64 = 1e-10;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    AnalyticClosedForm,
    TabulatedWithInterpolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HypothesisClass {
    KinkMonotoneQ1,
    KinkMonotoneQminus1,
    KlausShawBreather { peak: f64 },
    General,
}

impl fmt::Display for HypothesisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisClass::KinkMonotoneQ1 => write!(f, "monotone kink, charge +1"),
            HypothesisClass::KinkMonotoneQminus1 => write!(f, "monotone kink, charge -1"),
            HypothesisClass::KlausShawBreather { peak } => {
                write!(f, "single-hump breather, peak {peak:.6}")
            }
            HypothesisClass::General => write!(f, "general"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("breather peak must lie in (0, pi), got {0}")]
    PeakOutOfRange(f64),
    #[error("tail of sin(u/2) fails to drop below {eps:.1e} within |x| <= {limit}")]
    TailNotIntegrable { eps: f64, limit: f64 },
    #[error("asymptotic value u({side}) = {value:.6} is not an integer multiple of 2*pi")]
    AsymptoteNotMultipleOf2Pi { side: &'static str, value: f64 },
    #[error("table: {0}")]
    Table(String),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone)]
enum Field {
    Analytic { u: RealFn, ux: RealFn },
    Tabulated(Arc<CubicHermite>),
}

/// The initial datum u(x) with derivative, asymptotics, and cached scalars.
#[derive(Clone)]
pub struct PotentialProfile {
    field: Field,
    pub kind: ProfileKind,
    pub k_minus: i64,
    pub k_plus: i64,
    pub support_hint: Option<(f64, f64)>,
    x_min: f64,
    x_max: f64,
    /// Interior points where smoothness degrades (table knots kept sparse).
    breakpoints: Vec<f64>,
    label: String,
}

impl fmt::Debug for PotentialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialProfile")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("k_minus", &self.k_minus)
            .field("k_plus", &self.k_plus)
            .field("domain", &(self.x_min, self.x_max))
            .finish()
    }
}

impl PotentialProfile {
    /// Build from closures; the truncation window is grown until the
    /// endpoint decay test passes.
    pub fn from_closures(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ux: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_hint: Option<(f64, f64)>,
        label: impl Into<String>,
    ) -> Result<Self, PotentialError> {
        let u: RealFn = Arc::new(u);
        let ux: RealFn = Arc::new(ux);
        let (x_min, x_max) = truncation_window(&|x| u(x), support_hint)?;
        let (k_minus, k_plus) = asymptotic_indices(&|x| u(x), x_min, x_max)?;
        Ok(PotentialProfile {
            field: Field::Analytic { u, ux },
            kind: ProfileKind::AnalyticClosedForm,
            k_minus,
            k_plus,
            support_hint,
            x_min,
            x_max,
            breakpoints: Vec::new(),
            label: label.into(),
        })
    }

    /// Same as [`from_closures`] but with explicit interior breakpoints the
    /// integrator must land on (piecewise-defined fields).
    pub fn from_closures_with_breakpoints(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        ux: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_hint: Option<(f64, f64)>,
        breakpoints: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self, PotentialError> {
        let mut p = Self::from_closures(u, ux, support_hint, label)?;
        p.breakpoints = breakpoints;
        Ok(p)
    }

    /// The kink with sin(u/2) = sech x, cos(u/2) = tanh x; u = pi − 2 gd(x)
    /// runs from 2π down to 0 (charge −1).
    pub fn buckingham_miller() -> Self {
        let u = |x: f64| PI - 2.0 * gudermannian(x);
        let ux = |x: f64| -2.0 / x.cosh();
        Self::from_closures(u, ux, None, "buckingham-miller")
            .expect("closed-form kink always truncates")
    }

    pub fn monotone_kink(shape: KinkShape, scale: f64) -> Result<Self, PotentialError> {
        if !(scale > 0.0) {
            return Err(PotentialError::NonPositiveScale(scale));
        }
        match shape {
            KinkShape::AtanExp => Self::from_closures(
                move |x| 4.0 * (x / scale).exp().atan(),
                move |x| 2.0 / (scale * (x / scale).cosh()),
                None,
                format!("kink-atan-exp({scale})"),
            ),
            KinkShape::Tanh => Self::from_closures(
                move |x| PI * (1.0 + (x / scale).tanh()),
                move |x| PI / (scale * (x / scale).cosh().powi(2)),
                None,
                format!("kink-tanh({scale})"),
            ),
        }
    }

    /// Single-hump field peak·sech(x/width) with 0 < peak < π.
    pub fn klaus_shaw_breather(peak: f64, width: f64) -> Result<Self, PotentialError> {
        if !(peak > 0.0 && peak < PI) {
            return Err(PotentialError::PeakOutOfRange(peak));
        }
        if !(width > 0.0) {
            return Err(PotentialError::NonPositiveScale(width));
        }
        Self::from_closures(
            move |x| peak / (x / width).cosh(),
            move |x| {
                let c = (x / width).cosh();
                -peak * (x / width).tanh() / (width * c)
            },
            None,
            format!("breather({peak},{width})"),
        )
    }

    /// Load a tabulated profile from two-column text (x, u) with strictly
    /// increasing x.
    pub fn from_table(reader: impl BufRead) -> Result<Self, PotentialError> {
        let mut xs = Vec::new();
        let mut us = Vec::new();
        for (ln, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| PotentialError::Io(e.to_string()))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            let x: f64 = it
                .next()
                .ok_or_else(|| PotentialError::Table(format!("line {}: missing x", ln + 1)))?
                .parse()
                .map_err(|e| PotentialError::Table(format!("line {}: {e}", ln + 1)))?;
            let u: f64 = it
                .next()
                .ok_or_else(|| PotentialError::Table(format!("line {}: missing u", ln + 1)))?
                .parse()
                .map_err(|e| PotentialError::Table(format!("line {}: {e}", ln + 1)))?;
            xs.push(x);
            us.push(u);
        }
        let spline = CubicHermite::fitted(xs, us)
            .map_err(|e| PotentialError::Table(e.to_string()))?;
        let (x_min, x_max) = spline.range();
        let (k_minus, k_plus) = asymptotic_indices(&|x| spline.eval(x), x_min, x_max)?;
        let breakpoints = spline.knots().to_vec();
        Ok(PotentialProfile {
            field: Field::Tabulated(Arc::new(spline)),
            kind: ProfileKind::TabulatedWithInterpolation,
            k_minus,
            k_plus,
            support_hint: None,
            x_min,
            x_max,
            breakpoints,
            label: "tabulated".into(),
        })
    }

    /// Emit the two-column format at `n` equally spaced samples.
    pub fn write_table(&self, mut w: impl Write, n: usize) -> Result<(), PotentialError> {
        let n = n.max(2);
        for i in 0..n {
            let x = self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64;
            writeln!(w, "{:.17e} {:.17e}", x, self.u(x))
                .map_err(|e| PotentialError::Io(e.to_string()))?;
        }
        Ok(())
    }

    pub fn u(&self, x: f64) -> f64 {
        match &self.field {
            Field::Analytic { u, .. } => u(x),
            Field::Tabulated(s) => s.eval(x),
        }
    }

    pub fn u_x(&self, x: f64) -> f64 {
        match &self.field {
            Field::Analytic { ux, .. } => ux(x),
            Field::Tabulated(s) => s.deriv(x),
        }
    }

    pub fn sin_half(&self, x: f64) -> f64 {
        (0.5 * self.u(x)).sin()
    }

    pub fn cos_half(&self, x: f64) -> f64 {
        (0.5 * self.u(x)).cos()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn charge(&self) -> i64 {
        self.k_plus - self.k_minus
    }

    /// The reflected field u(−x); eigenvalues are unchanged under this map.
    pub fn reflected(&self) -> Self {
        let inner = self.clone();
        let inner2 = self.clone();
        let mut p = Self::from_closures(
            move |x| inner.u(-x),
            move |x| -inner2.u_x(-x),
            self.support_hint.map(|(a, b)| (-b, -a)),
            format!("{}:reflected", self.label),
        )
        .expect("reflection preserves truncation");
        p.breakpoints = self.breakpoints.iter().map(|b| -b).rev().collect();
        p.kind = self.kind;
        p
    }

    /// Matching point: the hump maximum for breathers, the u = π crossing
    /// for simple kinks, 0 otherwise.
    pub fn matching_point(&self) -> f64 {
        match self.classify() {
            HypothesisClass::KlausShawBreather { .. } => self.argmax_abs_u(),
            HypothesisClass::KinkMonotoneQ1 | HypothesisClass::KinkMonotoneQminus1 => {
                self.pi_crossing().unwrap_or(0.0)
            }
            HypothesisClass::General => 0.0,
        }
    }

    fn argmax_abs_u(&self) -> f64 {
        let n = 4001;
        let mut best = (0.0, f64::MIN);
        for i in 0..n {
            let x = self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64;
            let v = self.u(x).abs();
            if v > best.1 {
                best = (x, v);
            }
        }
        best.0
    }

    fn pi_crossing(&self) -> Option<f64> {
        let target = PI * (self.k_minus + self.k_plus) as f64; // midpoint level
        let f = |x: f64| self.u(x) - target;
        let (a, b) = (self.x_min, self.x_max);
        let (fa, fb) = (f(a), f(b));
        if fa * fb > 0.0 {
            return None;
        }
        Some(crate::numerics::refine_bracket(f, a, b, fa, fb, 1e-12, 200))
    }

    /// Signed ∫ sin(u/2) dx and the L¹ norm, with a certified tail bound.
    pub fn l1_sine_half(&self) -> Result<SineHalfIntegral, PotentialError> {
        self.tail_certificate()?;
        let signed = quad::integrate(
            |x| self.sin_half(x),
            self.x_min,
            self.x_max,
            &self.breakpoints,
            QUAD_TARGET * 1e-1,
        )
        .map_err(|e| PotentialError::Table(e.to_string()))?;
        let abs = quad::integrate(
            |x| self.sin_half(x).abs(),
            self.x_min,
            self.x_max,
            &self.breakpoints,
            QUAD_TARGET * 1e-1,
        )
        .map_err(|e| PotentialError::Table(e.to_string()))?;
        Ok(SineHalfIntegral {
            signed: signed.value,
            abs: abs.value,
            quadrature_error: signed.error + abs.error,
        })
    }

    /// Exponential-fit bound on the neglected tails of |sin(u/2)|.
    fn tail_certificate(&self) -> Result<(), PotentialError> {
        for (x_end, dir) in [(self.x_min, -1.0), (self.x_max, 1.0)] {
            let s0 = self.sin_half(x_end).abs();
            if s0 > TRUNCATION_EPS {
                return Err(PotentialError::TailNotIntegrable {
                    eps: TRUNCATION_EPS,
                    limit: x_end.abs(),
                });
            }
            // below ~1e-14 the samples are rounding noise of sin near
            // multiples of pi and carry no rate information
            if s0 > 1e-14 {
                let s1 = self.sin_half(x_end - dir * 0.5).abs();
                let rate = (s1 / s0).ln() / 0.5;
                if rate <= 0.0 || s0 / rate > TRUNCATION_EPS {
                    return Err(PotentialError::TailNotIntegrable {
                        eps: TRUNCATION_EPS,
                        limit: x_end.abs(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Topological charge from the derivative route, (1/2π)∫u_x dx.
    pub fn charge_from_gradient(&self) -> Result<f64, PotentialError> {
        let r = quad::integrate(
            |x| self.u_x(x),
            self.x_min,
            self.x_max,
            &self.breakpoints,
            QUAD_TARGET,
        )
        .map_err(|e| PotentialError::Table(e.to_string()))?;
        Ok(r.value / (2.0 * PI))
    }

    /// The strictest hypothesis class whose predicate holds.
    pub fn classify(&self) -> HypothesisClass {
        let n = 2001;
        let q = self.charge();
        let mut ux_min = f64::MAX;
        let mut ux_max = f64::MIN;
        let mut u_min = f64::MAX;
        let mut u_max = f64::MIN;
        let mut sign_changes = 0usize;
        let mut last_sign = 0i8;
        let scale: f64 = (0..n)
            .map(|i| {
                let x = self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64;
                self.u_x(x).abs()
            })
            .fold(0.0, f64::max);
        let tol = 1e-9 * scale.max(1e-9);
        for i in 0..n {
            let x = self.x_min + (self.x_max - self.x_min) * i as f64 / (n - 1) as f64;
            let ux = self.u_x(x);
            let u = self.u(x);
            ux_min = ux_min.min(ux);
            ux_max = ux_max.max(ux);
            u_min = u_min.min(u);
            u_max = u_max.max(u);
            let s = if ux > tol {
                1
            } else if ux < -tol {
                -1
            } else {
                0
            };
            if s != 0 {
                if last_sign != 0 && s != last_sign {
                    sign_changes += 1;
                }
                last_sign = s;
            }
        }

        if q == 1 && ux_min >= -tol {
            return HypothesisClass::KinkMonotoneQ1;
        }
        if q == -1 && ux_max <= tol {
            return HypothesisClass::KinkMonotoneQminus1;
        }
        if q == 0 && sign_changes == 1 {
            let nonneg = u_min >= -1e-9;
            let nonpos = u_max <= 1e-9;
            let peak = u_max.abs().max(u_min.abs());
            if (nonneg || nonpos) && peak > 0.0 && peak < PI {
                return HypothesisClass::KlausShawBreather { peak };
            }
        }
        HypothesisClass::General
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineHalfIntegral {
    pub signed: f64,
    pub abs: f64,
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkShape {
    /// u = 4 atan(exp(x/scale)); sin(u/2) = sech(x/scale)
    AtanExp,
    /// u = π(1 + tanh(x/scale))
    Tanh,
}

/// gd(x) = 2 atan(tanh(x/2))
pub fn gudermannian(x: f64) -> f64 {
    2.0 * (0.5 * x).tanh().atan()
}

fn truncation_window(
    u: &dyn Fn(f64) -> f64,
    hint: Option<(f64, f64)>,
) -> Result<(f64, f64), PotentialError> {
    let decayed = |x: f64| {
        let h = 0.5 * u(x);
        h.sin().abs().max(1.0 - h.cos().abs()) < TRUNCATION_EPS
    };
    let mut lo = hint.map_or(-8.0, |(a, _)| a.min(-1.0));
    let mut hi = hint.map_or(8.0, |(_, b)| b.max(1.0));
    const LIMIT: f64 = 2000.0;
    // hold the window at points where a whole neighborhood has decayed, not
    // just a single sample (sign changes of sin(u/2) would fool one probe)
    let window_ok = |x: f64, dir: f64| (0..5).all(|i| decayed(x + dir * 0.37 * i as f64));
    while !window_ok(lo, -1.0) {
        lo *= 1.35;
        if lo < -LIMIT {
            return Err(PotentialError::TailNotIntegrable {
                eps: TRUNCATION_EPS,
                limit: LIMIT,
            });
        }
    }
    while !window_ok(hi, 1.0) {
        hi *= 1.35;
        if hi > LIMIT {
            return Err(PotentialError::TailNotIntegrable {
                eps: TRUNCATION_EPS,
                limit: LIMIT,
            });
        }
    }
    Ok((lo, hi))
}

fn asymptotic_indices(
    u: &dyn Fn(f64) -> f64,
    x_min: f64,
    x_max: f64,
) -> Result<(i64, i64), PotentialError> {
    let two_pi = 2.0 * PI;
    let vm = u(x_min) / two_pi;
    let vp = u(x_max) / two_pi;
    let km = vm.round();
    let kp = vp.round();
    if (vm - km).abs() > 1e-6 {
        return Err(PotentialError::AsymptoteNotMultipleOf2Pi {
            side: "-inf",
            value: u(x_min),
        });
    }
    if (vp - kp).abs() > 1e-6 {
        return Err(PotentialError::AsymptoteNotMultipleOf2Pi {
            side: "+inf",
            value: u(x_max),
        });
    }
    Ok((km as i64, kp as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckingham_miller_values() {
        let p = PotentialProfile::buckingham_miller();
        assert!((p.u(0.0) - PI).abs() < 1e-14, "u(0) must be pi");
        // sin(u/2) = sech x, frozen at x = 5
        assert!((p.sin_half(5.0) - 0.013_475_282_221_304_557).abs() < 1e-14);
        assert!((p.cos_half(2.0) - 2.0f64.tanh()).abs() < 1e-13);
        assert_eq!(p.k_minus, 1);
        assert_eq!(p.k_plus, 0);
        assert_eq!(p.charge(), -1);
    }

    #[test]
    fn buckingham_miller_l1_is_pi() {
        let p = PotentialProfile::buckingham_miller();
        let i = p.l1_sine_half().unwrap();
        assert!((i.signed - PI).abs() < 1e-9, "signed {}", i.signed);
        assert!((i.abs - PI).abs() < 1e-9);
    }

    #[test]
    fn atan_exp_kink_basics() {
        let p = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        assert!((p.u(0.0) - PI).abs() < 1e-13);
        assert_eq!(p.charge(), 1);
        // I = pi * scale for this family
        let i = p.l1_sine_half().unwrap();
        assert!((i.signed - PI).abs() < 1e-9);
        let p2 = PotentialProfile::monotone_kink(KinkShape::AtanExp, 2.5).unwrap();
        let i2 = p2.l1_sine_half().unwrap();
        assert!((i2.signed - 2.5 * PI).abs() < 1e-9);
    }

    #[test]
    fn kink_rejects_bad_scale() {
        assert!(matches!(
            PotentialProfile::monotone_kink(KinkShape::AtanExp, 0.0),
            Err(PotentialError::NonPositiveScale(_))
        ));
        assert!(PotentialProfile::monotone_kink(KinkShape::AtanExp, -1.0).is_err());
    }

    #[test]
    fn breather_construction_and_classification() {
        let p = PotentialProfile::klaus_shaw_breather(PI / 2.0, 1.0).unwrap();
        assert!((p.u(0.0) - PI / 2.0).abs() < 1e-13);
        assert_eq!(p.charge(), 0);
        match p.classify() {
            HypothesisClass::KlausShawBreather { peak } => {
                assert!((peak - PI / 2.0).abs() < 1e-9)
            }
            c => panic!("expected breather class, got {c:?}"),
        }
        assert!(PotentialProfile::klaus_shaw_breather(PI, 1.0).is_err());
        assert!(PotentialProfile::klaus_shaw_breather(-0.3, 1.0).is_err());
        assert!(PotentialProfile::klaus_shaw_breather(4.0, 1.0).is_err());
    }

    #[test]
    fn breather_derivative_changes_sign_once() {
        let p = PotentialProfile::klaus_shaw_breather(PI / 2.0, 1.0).unwrap();
        let (a, b) = p.domain();
        let mut changes = 0;
        let mut last = p.u_x(a + 0.01).signum();
        for i in 1..2000 {
            let x = a + (b - a) * i as f64 / 2000.0;
            let s = p.u_x(x).signum();
            if s != last && s != 0.0 {
                changes += 1;
                last = s;
            }
        }
        assert_eq!(changes, 1);
    }

    #[test]
    fn classification_table() {
        let bm = PotentialProfile::buckingham_miller();
        assert_eq!(bm.classify(), HypothesisClass::KinkMonotoneQminus1);

        let k = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.7).unwrap();
        assert_eq!(k.classify(), HypothesisClass::KinkMonotoneQ1);

        // odd field: fails the fixed-sign tests
        let odd = PotentialProfile::from_closures(
            |x: f64| PI * x.tanh() / x.cosh(),
            |x: f64| {
                let t = x.tanh();
                let s = 1.0 / x.cosh();
                PI * (s.powi(2) * s - t * t * s)
            },
            None,
            "odd",
        )
        .unwrap();
        assert_eq!(odd.classify(), HypothesisClass::General);
    }

    #[test]
    fn charge_matches_gradient_route() {
        for p in [
            PotentialProfile::buckingham_miller(),
            PotentialProfile::monotone_kink(KinkShape::AtanExp, 2.0).unwrap(),
            PotentialProfile::monotone_kink(KinkShape::Tanh, 1.3).unwrap(),
            PotentialProfile::klaus_shaw_breather(1.0, 2.0).unwrap(),
        ] {
            let q = p.charge_from_gradient().unwrap();
            assert!(
                (q - p.charge() as f64).abs() < 1e-6,
                "{}: {} vs {}",
                p.label(),
                q,
                p.charge()
            );
        }
    }

    #[test]
    fn reflection_flips_charge_and_class() {
        let k = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        let r = k.reflected();
        assert_eq!(r.charge(), -1);
        assert_eq!(r.classify(), HypothesisClass::KinkMonotoneQminus1);
        let i0 = k.l1_sine_half().unwrap().signed;
        let i1 = r.l1_sine_half().unwrap().signed;
        assert!((i0 - i1).abs() < 1e-9);
    }

    #[test]
    fn zero_potential_l1_is_zero() {
        let p = PotentialProfile::from_closures(|_| 0.0, |_| 0.0, Some((-1.0, 1.0)), "zero")
            .unwrap();
        let i = p.l1_sine_half().unwrap();
        assert_eq!(i.signed, 0.0);
        assert_eq!(i.abs, 0.0);
    }

    #[test]
    fn table_roundtrip() {
        let p = PotentialProfile::klaus_shaw_breather(1.2, 1.5).unwrap();
        let mut buf = Vec::new();
        p.write_table(&mut buf, 4001).unwrap();
        let q = PotentialProfile::from_table(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(q.kind, ProfileKind::TabulatedWithInterpolation);
        assert_eq!(q.charge(), 0);
        for x in [-3.0, -0.4, 0.0, 1.1, 2.7] {
            // pchip is locally 3rd order near the hump: sub-microradian here
            assert!(
                (q.u(x) - p.u(x)).abs() < 1e-6,
                "table interp at {x}: {} vs {}",
                q.u(x),
                p.u(x)
            );
        }
        match q.classify() {
            HypothesisClass::KlausShawBreather { peak } => assert!((peak - 1.2).abs() < 1e-6),
            c => panic!("tabulated breather classified as {c:?}"),
        }
    }

    #[test]
    fn table_rejects_decreasing_x() {
        let data = "0.0 1.0\n1.0 2.0\n0.5 1.5\n";
        assert!(PotentialProfile::from_table(std::io::Cursor::new(data)).is_err());
    }
}
