//! Argument-principle eigenvalue search over the upper half plane.
//!
//! The Wronskian is analytic in z away from the origin, so the number of
//! eigenvalues inside a closed contour equals its winding number.  Cells of
//! an annulus-sector (rectangles in w = ln z) are subdivided until each
//! isolates one zero, which Newton then polishes.  Since the stationary
//! problem is symmetric under z → 1/z̄, only the |z| ≤ 1.05 part is swept
//! directly and the outer part is completed through the symmetry, with every
//! completed point re-certified against |W|.

use crate::krein::{self, KreinError, SignatureReport};
use crate::potentials::{HypothesisClass, PotentialError, PotentialProfile};
use crate::pruefer::{self, CountBasis, PrueferError};
use crate::scattering::{
    self, Eigenfunction, ScatteringError, SpectralParameter, WronskianDerivative,
};
use crate::Tolerances;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("scattering: {0}")]
    Scattering(#[from] ScatteringError),
    #[error("krein: {0}")]
    Krein(#[from] KreinError),
    #[error("counting: {0}")]
    Pruefer(#[from] PrueferError),
    #[error("potential: {0}")]
    Potential(#[from] PotentialError),
    #[error("zero of W pinned to the contour after {attempts} perturbation attempts")]
    ZeroOnContour { attempts: usize },
    #[error("cell at ({a0:.4},{b0:.4})..({a1:.4},{b1:.4}) with winding {winding} could not be isolated within {limit} subdivision levels")]
    SubdivisionLimit {
        a0: f64,
        a1: f64,
        b0: f64,
        b1: f64,
        winding: i64,
        limit: u32,
    },
    #[error("winding sampling budget exhausted ({evaluations} evaluations)")]
    WindingBudget { evaluations: usize },
    #[error("exclusion regions need a single-hump breather; profile classifies as {0:?}")]
    HypothesisNotMet(HypothesisClass),
    #[error("located zero at {z} failed certification: {detail}")]
    Certification { z: Complex64, detail: String },
}

/// Search region in the open upper half plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRegion {
    pub kind: RegionKind,
    /// Regions declared eigenvalue-free; cells fully inside are skipped and
    /// verification asserts no located point lands there.
    pub excluded: Vec<ExclusionRegion>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegionKind {
    AnnulusSector {
        r_min: f64,
        r_max: f64,
        theta_min: f64,
        theta_max: f64,
    },
    Rectangle {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },
}

impl Default for SearchRegion {
    fn default() -> Self {
        SearchRegion {
            kind: RegionKind::AnnulusSector {
                r_min: scattering::MIN_MODULUS,
                r_max: 20.0,
                theta_min: 0.01,
                theta_max: PI - 0.01,
            },
            excluded: Vec::new(),
        }
    }
}

impl SearchRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        let inside = match self.kind {
            RegionKind::AnnulusSector {
                r_min,
                r_max,
                theta_min,
                theta_max,
            } => {
                let r = z.norm();
                let t = z.arg();
                r >= r_min && r <= r_max && t >= theta_min && t <= theta_max
            }
            RegionKind::Rectangle {
                re_min,
                re_max,
                im_min,
                im_max,
            } => z.re >= re_min && z.re <= re_max && z.im >= im_min && z.im <= im_max,
        };
        inside && !self.excluded.iter().any(|e| e.contains(z))
    }
}

/// Eigenvalue-free regions derived from the a-priori bounds for single-hump
/// charge-0 potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExclusionRegion {
    /// Disk of the given radius tangent to the origin at i·radius, taken
    /// inside the angular sector (lo, hi).
    OriginTangentDisk { radius: f64, sector: (f64, f64) },
    /// Half plane Im z > im_min inside the sector: the inversion image of
    /// the tangent disk.
    UpperHalfStrip { im_min: f64, sector: (f64, f64) },
    /// Complement of the allowed sector 0 < arg z < theta_max.
    SectorComplement { theta_max: f64 },
    /// Ball |z| < radius around the origin.
    OriginBall { radius: f64 },
}

impl ExclusionRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        // the spectrum is symmetric across the imaginary axis; angular
        // conditions act on the first-quadrant representative
        let t = z.arg();
        let t_eff = t.min(PI - t);
        match *self {
            ExclusionRegion::OriginTangentDisk { radius, sector } => {
                let c = Complex64::new(0.0, radius);
                (z - c).norm() < radius && t_eff > sector.0 && t_eff < sector.1
            }
            ExclusionRegion::UpperHalfStrip { im_min, sector } => {
                z.im > im_min && t_eff > sector.0 && t_eff < sector.1
            }
            ExclusionRegion::SectorComplement { theta_max } => {
                z.im > 0.0 && t_eff >= theta_max
            }
            ExclusionRegion::OriginBall { radius } => z.norm() < radius,
        }
    }
}

/// A located, certified eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: Complex64,
    /// |W(z)| relative to the contour scale of the search.
    pub residual: f64,
    pub wdot: Complex64,
    pub wdot_method: scattering::DerivMethod,
    pub on_circle: bool,
    pub signature: SignatureReport,
    pub simple: bool,
}

/// Closed contour in the z plane: a rectangle in either Cartesian or
/// log-polar coordinates, or an explicit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Contour {
    /// Rectangle [a0,a1]×[b0,b1]; log-polar maps (a,b) ↦ exp(a)·e^{ib}.
    Rect {
        a0: f64,
        a1: f64,
        b0: f64,
        b1: f64,
        log_polar: bool,
    },
    Circle { center: Complex64, radius: f64 },
}

impl Contour {
    pub fn annulus_sector(r_min: f64, r_max: f64, theta_min: f64, theta_max: f64) -> Self {
        Contour::Rect {
            a0: r_min.ln(),
            a1: r_max.ln(),
            b0: theta_min,
            b1: theta_max,
            log_polar: true,
        }
    }

    /// Point at parameter t ∈ [0,1), counterclockwise.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Contour::Circle { center, radius } => {
                center + radius * Complex64::from_polar(1.0, 2.0 * PI * t)
            }
            Contour::Rect {
                a0,
                a1,
                b0,
                b1,
                log_polar,
            } => {
                let s = (t.rem_euclid(1.0)) * 4.0;
                let (a, b) = if s < 1.0 {
                    (a0 + (a1 - a0) * s, b0)
                } else if s < 2.0 {
                    (a1, b0 + (b1 - b0) * (s - 1.0))
                } else if s < 3.0 {
                    (a1 - (a1 - a0) * (s - 2.0), b1)
                } else {
                    (a0, b1 - (b1 - b0) * (s - 3.0))
                };
                if log_polar {
                    Complex64::from_polar(a.exp(), b)
                } else {
                    Complex64::new(a, b)
                }
            }
        }
    }

    fn expanded(&self, factor: f64) -> Contour {
        match *self {
            Contour::Circle { center, radius } => Contour::Circle {
                center,
                radius: radius * factor,
            },
            Contour::Rect {
                a0,
                a1,
                b0,
                b1,
                log_polar,
            } => {
                let da = (a1 - a0) * (factor - 1.0) * 0.5;
                let db = (b1 - b0) * (factor - 1.0) * 0.5;
                Contour::Rect {
                    a0: a0 - da,
                    a1: a1 + da,
                    b0: b0 - db,
                    b1: b1 + db,
                    log_polar,
                }
            }
        }
    }
}

const WINDING_DEPTH: u32 = 40;
const SUBDIVISION_LIMIT: u32 = 40;

struct WindingOutcome {
    turns: i64,
    max_abs: f64,
}

fn winding_adaptive(
    contour: &Contour,
    eval: &dyn Fn(Complex64) -> Result<Complex64, ScatteringError>,
    initial: usize,
    zero_floor: f64,
    budget: usize,
) -> Result<WindingOutcome, SearchError> {
    let n0 = initial.max(8);
    let mut evals = 0usize;
    let sample = |t: f64, evals: &mut usize| -> Result<Complex64, SearchError> {
        *evals += 1;
        if *evals > budget {
            return Err(SearchError::WindingBudget {
                evaluations: *evals,
            });
        }
        Ok(eval(contour.point(t))?)
    };

    let mut pts: Vec<(f64, Complex64)> = Vec::with_capacity(n0 + 1);
    for i in 0..n0 {
        let t = i as f64 / n0 as f64;
        let w = sample(t, &mut evals)?;
        pts.push((t, w));
    }
    pts.push((1.0, pts[0].1));

    let mut max_abs: f64 = 0.0;
    let mut min_abs = f64::INFINITY;
    for (_, w) in &pts {
        max_abs = max_abs.max(w.norm());
        min_abs = min_abs.min(w.norm());
    }
    if max_abs == 0.0 || min_abs < zero_floor * max_abs {
        return Err(SearchError::ZeroOnContour { attempts: 0 });
    }

    let mut total = 0.0f64;
    let mut stack: Vec<(f64, f64, Complex64, Complex64, u32)> = pts
        .windows(2)
        .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1, 0u32))
        .collect();
    while let Some((t0, t1, w0, w1, depth)) = stack.pop() {
        let dphi = (w1 / w0).arg();
        if dphi.abs() <= FRAC_PI_2 {
            total += dphi;
            continue;
        }
        if depth >= WINDING_DEPTH {
            return Err(SearchError::ZeroOnContour {
                attempts: depth as usize,
            });
        }
        let tm = 0.5 * (t0 + t1);
        let wm = sample(tm, &mut evals)?;
        let a = wm.norm();
        max_abs = max_abs.max(a);
        if a < zero_floor * max_abs {
            return Err(SearchError::ZeroOnContour {
                attempts: depth as usize,
            });
        }
        stack.push((t0, tm, w0, wm, depth + 1));
        stack.push((tm, t1, wm, w1, depth + 1));
    }

    let turns_f = total / (2.0 * PI);
    let turns = turns_f.round();
    if (turns_f - turns).abs() > 0.25 {
        return Err(SearchError::ZeroOnContour { attempts: 0 });
    }
    Ok(WindingOutcome {
        turns: turns as i64,
        max_abs,
    })
}

/// Total phase change of W along the contour, divided by 2π.
///
/// Sampling refines until every phase increment is below π/2; a |W|
/// collapse on the contour triggers up to five outward perturbations.
pub fn winding_number(
    contour: &Contour,
    p: &PotentialProfile,
    tol: f64,
) -> Result<i64, SearchError> {
    let eval = |z: Complex64| -> Result<Complex64, ScatteringError> {
        scattering::wronskian(&SpectralParameter::new(z)?, p, tol)
    };
    winding_with_retry(contour, &eval, 48).map(|o| o.turns)
}

fn winding_with_retry(
    contour: &Contour,
    eval: &dyn Fn(Complex64) -> Result<Complex64, ScatteringError>,
    initial: usize,
) -> Result<WindingOutcome, SearchError> {
    let mut attempts = 0usize;
    let mut c = *contour;
    loop {
        match winding_adaptive(&c, eval, initial, 1e-12, 60_000) {
            Ok(out) => return Ok(out),
            Err(SearchError::ZeroOnContour { .. }) if attempts < 5 => {
                attempts += 1;
                c = c.expanded(1.0 + 0.017 * attempts as f64);
            }
            Err(e) => return Err(e),
        }
    }
}

struct Cell {
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
    depth: u32,
}

impl Cell {
    fn contour(&self, log_polar: bool) -> Contour {
        Contour::Rect {
            a0: self.a0,
            a1: self.a1,
            b0: self.b0,
            b1: self.b1,
            log_polar,
        }
    }

    fn center(&self, log_polar: bool) -> Complex64 {
        let a = 0.5 * (self.a0 + self.a1);
        let b = 0.5 * (self.b0 + self.b1);
        if log_polar {
            Complex64::from_polar(a.exp(), b)
        } else {
            Complex64::new(a, b)
        }
    }

    fn z_diameter(&self, log_polar: bool) -> f64 {
        let da = self.a1 - self.a0;
        let db = self.b1 - self.b0;
        if log_polar {
            self.a1.exp() * da.hypot(db) * 1.2
        } else {
            da.hypot(db)
        }
    }

    // asymmetric split keeps cell boundaries off the unit circle and the
    // imaginary axis, where all the zeros live
    fn split(&self) -> [Cell; 4] {
        let fa = 0.537;
        let am = self.a0 + (self.a1 - self.a0) * fa;
        let bm = self.b0 + (self.b1 - self.b0) * fa;
        let d = self.depth + 1;
        [
            Cell { a0: self.a0, a1: am, b0: self.b0, b1: bm, depth: d },
            Cell { a0: am, a1: self.a1, b0: self.b0, b1: bm, depth: d },
            Cell { a0: self.a0, a1: am, b0: bm, b1: self.b1, depth: d },
            Cell { a0: am, a1: self.a1, b0: bm, b1: self.b1, depth: d },
        ]
    }
}

fn newton_refine(z0: Complex64, p: &PotentialProfile, tol: f64) -> Result<Complex64, SearchError> {
    let mut z = z0;
    let mut last_step = f64::INFINITY;
    for _ in 0..40 {
        let zp = SpectralParameter::new(z)?;
        if zp.z().im <= 0.0 || zp.r() < scattering::MIN_MODULUS {
            return Err(SearchError::Certification {
                z,
                detail: "Newton iterate left the admissible half plane".into(),
            });
        }
        let w = scattering::wronskian(&zp, p, tol)?;
        let h = 1e-6 * (1.0 + z.norm());
        let wp = scattering::wronskian(&SpectralParameter::new(z + h).unwrap(), p, tol)?;
        let wm = scattering::wronskian(&SpectralParameter::new(z - h).unwrap(), p, tol)?;
        let dw = (wp - wm) / (2.0 * h);
        if dw.norm() == 0.0 {
            return Err(SearchError::Certification {
                z,
                detail: "vanishing Wronskian derivative in Newton".into(),
            });
        }
        let dz = w / dw;
        z -= dz;
        let step = dz.norm();
        if step < 1e-11 * (1.0 + z.norm()) && last_step < 1e-8 * (1.0 + z.norm()) {
            return Ok(z);
        }
        last_step = step;
    }
    Ok(z)
}

/// Locate every eigenvalue in the region.  The annulus-sector sweep covers
/// |z| ≤ ~1.05 directly and completes the outer part through z → 1/z̄; all
/// points, direct or completed, are certified against |W|, assigned
/// signatures, and sorted by (Re z, Im z).
pub fn locate_eigenvalues(
    region: &SearchRegion,
    p: &PotentialProfile,
    tols: &Tolerances,
) -> Result<Vec<SpectralPoint>, SearchError> {
    let search_tol = (tols.ode * 30.0).min(1e-8);
    let (log_polar, a0, a1, b0, b1) = match region.kind {
        RegionKind::AnnulusSector {
            r_min,
            r_max,
            theta_min,
            theta_max,
        } => {
            let r_hi = r_max.min(1.05);
            (true, r_min.ln(), r_hi.ln(), theta_min, theta_max)
        }
        RegionKind::Rectangle {
            re_min,
            re_max,
            im_min,
            im_max,
        } => (false, re_min, re_max, im_min, im_max),
    };

    let eval = |z: Complex64| -> Result<Complex64, ScatteringError> {
        scattering::wronskian(&SpectralParameter::new(z)?, p, search_tol)
    };

    let root = Cell {
        a0,
        a1,
        b0,
        b1,
        depth: 0,
    };
    let top = winding_with_retry(&root.contour(log_polar), &eval, 96)?;
    let scale = top.max_abs.max(1e-300);
    let zero_abs_threshold = tols.eigenvalue * scale;

    let mut zeros: Vec<Complex64> = Vec::new();
    if top.turns != 0 {
        let mut frontier: Vec<Cell> = vec![root];
        while !frontier.is_empty() {
            // one wave of windings, evaluated in parallel, merged in order
            let contours: Vec<Contour> =
                frontier.iter().map(|c| c.contour(log_polar)).collect();
            let outcomes = crate::par_map(contours, |ct| winding_with_retry(&ct, &eval, 32));
            let mut next: Vec<Cell> = Vec::new();
            for (cell, out) in frontier.into_iter().zip(outcomes) {
                let out = out?;
                if out.turns == 0 {
                    continue;
                }
                let small = cell.z_diameter(log_polar) < 0.04;
                if out.turns == 1 && small {
                    let z = newton_refine(cell.center(log_polar), p, search_tol)?;
                    zeros.push(z);
                    continue;
                }
                if cell.depth >= SUBDIVISION_LIMIT {
                    return Err(SearchError::SubdivisionLimit {
                        a0: cell.a0,
                        a1: cell.a1,
                        b0: cell.b0,
                        b1: cell.b1,
                        winding: out.turns,
                        limit: SUBDIVISION_LIMIT,
                    });
                }
                for sub in cell.split() {
                    let corners_excluded = !region.excluded.is_empty()
                        && region.excluded.iter().any(|e| {
                            [
                                (sub.a0, sub.b0),
                                (sub.a1, sub.b0),
                                (sub.a0, sub.b1),
                                (sub.a1, sub.b1),
                            ]
                            .iter()
                            .all(|&(a, b)| {
                                let z = if log_polar {
                                    Complex64::from_polar(a.exp(), b)
                                } else {
                                    Complex64::new(a, b)
                                };
                                e.contains(z)
                            })
                        });
                    if !corners_excluded {
                        next.push(sub);
                    }
                }
            }
            frontier = next;
        }
    }

    zeros.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    zeros.dedup_by(|x, y| (*x - *y).norm() < 1e-7);

    // symmetry completion into the full requested region
    let mut all = zeros.clone();
    if log_polar {
        for &z in &zeros {
            let partner = z.conj().inv();
            if (partner - z).norm() > 1e-7 && region.contains(partner) {
                all.push(partner);
            }
        }
    }
    all.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap());
    all.dedup_by(|x, y| (*x - *y).norm() < 1e-7);

    let mut points = Vec::with_capacity(all.len());
    for z in all {
        points.push(certify_point(z, p, tols, scale, zero_abs_threshold)?);
    }
    points.sort_by(|x, y| (x.z.re, x.z.im).partial_cmp(&(y.z.re, y.z.im)).unwrap());
    Ok(points)
}

fn certify_point(
    z: Complex64,
    p: &PotentialProfile,
    tols: &Tolerances,
    scale: f64,
    zero_abs_threshold: f64,
) -> Result<SpectralPoint, SearchError> {
    let zp = SpectralParameter::new(z)?;
    let w = scattering::wronskian(&zp, p, tols.ode)?;
    let residual = w.norm() / scale;
    if w.norm() > zero_abs_threshold {
        return Err(SearchError::Certification {
            z,
            detail: format!(
                "|W| = {:.3e} above threshold {:.3e}",
                w.norm(),
                zero_abs_threshold
            ),
        });
    }
    let eig =
        Eigenfunction::assemble(&zp, p, tols.ode).map_err(|e| SearchError::Certification {
            z,
            detail: e.to_string(),
        })?;
    let signature = krein::signature_report(&eig, p)?;
    let WronskianDerivative {
        value: wdot,
        method,
    } = scattering::wronskian_derivative(&zp, p, tols.ode)?;
    Ok(SpectralPoint {
        z,
        residual,
        wdot,
        wdot_method: method,
        on_circle: zp.on_circle(1e-6),
        signature,
        simple: wdot.norm() > 1e-6,
    })
}

/// Derived eigenvalue-free regions for single-hump charge-0 profiles.
///
/// The bound chain (integrals over the truncated domain, |z| ≤ 1): the
/// fixed-point operator built from f± = ±u_x/4 + (iz/4)·sin u satisfies
///
///   ‖T‖ ≤ E · ‖f₊‖₁ · ‖f₋‖∞ · 2(a² + b²)/b,     z = a + ib,
///
/// where E bounds the oscillator factor exp((b/2)∫(1 − cos u)) along the
/// hump: E = 1 when the peak stays ≤ π/2 (cos u ≥ 0 there), otherwise
/// E = exp(V/2) with V = ∫(1 − cos u).  With
///
///   ‖f₊‖₁ ≤ (‖u_x‖₁ + ‖sin u‖₁)/4,   ‖f₋‖∞ ≤ (‖u_x‖∞ + 1)/4,
///
/// ‖T‖ < 1/2 holds on {(a² + b²)/b < 1/(2C)} with
/// C = max(1/2, E(‖u_x‖₁ + ‖sin u‖₁)(‖u_x‖∞ + 1)/8), which is the disk of
/// radius ρ = 1/(4C) tangent to the origin.  Inside it the solution pinned
/// at −∞ cannot decay at +∞, so no eigenvalue lies in disk ∩ sector.
/// Mapping through z → 1/z̄ yields the strip Im z > 2C ∩ sector; combining
/// with the sector bound θ < u0/2 gives a full origin ball of radius
/// 2ρ·cos(u0/2), since off-circle eigenvalues only exist inside the sector.
/// The constant is conservative: the regions are consistency checks, not
/// search restrictions.
pub fn exclusion_regions(p: &PotentialProfile) -> Result<Vec<ExclusionRegion>, SearchError> {
    let peak = match p.classify() {
        HypothesisClass::KlausShawBreather { peak } => peak,
        other => return Err(SearchError::HypothesisNotMet(other)),
    };
    let (x_min, x_max) = p.domain();
    let quad_tol = 1e-9;
    let to_err = |e: crate::numerics::quad::QuadError| PotentialError::Table(e.to_string());
    let n1 = crate::numerics::quad::integrate(
        |x| p.u_x(x).abs(),
        x_min,
        x_max,
        &[p.matching_point()],
        quad_tol,
    )
    .map_err(to_err)?
    .value;
    let s1 = crate::numerics::quad::integrate(|x| p.u(x).sin().abs(), x_min, x_max, &[], quad_tol)
        .map_err(to_err)?
        .value;
    let v_osc =
        crate::numerics::quad::integrate(|x| 1.0 - p.u(x).cos(), x_min, x_max, &[], quad_tol)
            .map_err(to_err)?
            .value;
    let mut ux_inf: f64 = 0.0;
    for i in 0..=4000 {
        let x = x_min + (x_max - x_min) * i as f64 / 4000.0;
        ux_inf = ux_inf.max(p.u_x(x).abs());
    }
    let osc = if peak <= FRAC_PI_2 + 1e-12 {
        1.0
    } else {
        (0.5 * v_osc).exp()
    };
    let c_bound = (osc * (n1 + s1) * (ux_inf + 1.0) / 8.0).max(0.5);
    let rho = 1.0 / (4.0 * c_bound);
    let sector = ((PI - peak) / 2.0, peak / 2.0);
    let ball = (2.0 * rho * (0.5 * peak).cos()).min(0.999);
    Ok(vec![
        ExclusionRegion::OriginTangentDisk {
            radius: rho,
            sector,
        },
        ExclusionRegion::UpperHalfStrip {
            im_min: 2.0 * c_bound,
            sector,
        },
        ExclusionRegion::SectorComplement {
            theta_max: peak / 2.0,
        },
        ExclusionRegion::OriginBall { radius: ball },
    ])
}

/// One verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCheck {
    pub name: String,
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<SpectrumCheck>,
    pub all_passed: bool,
}

impl VerificationReport {
    fn push(&mut self, name: &str, applicable: bool, passed: bool, detail: String) {
        self.checks.push(SpectrumCheck {
            name: name.into(),
            applicable,
            passed: passed || !applicable,
            detail,
        });
    }
}

/// Aggregate counting, confinement, simplicity, sector, exclusion,
/// symmetry-closure, stationarity, and signature checks into one report.
pub fn verify_spectrum(
    points: &[SpectralPoint],
    p: &PotentialProfile,
    tols: &Tolerances,
) -> Result<VerificationReport, SearchError> {
    let class = p.classify();
    let hypothesis = !matches!(class, HypothesisClass::General);
    let mut report = VerificationReport {
        checks: Vec::new(),
        all_passed: true,
    };

    let quadrant = points
        .iter()
        .filter(|pt| pt.z.re > 0.0 && pt.z.arg() < FRAC_PI_2)
        .count();
    let total = points.len();
    match pruefer::count_exact(p, tols.ode) {
        Ok(cr) => {
            let located = match cr.basis {
                CountBasis::ExactMonotoneKink => total,
                _ => quadrant,
            };
            let expected = cr.exact_count.unwrap_or(cr.lower_bound);
            report.push(
                "count",
                true,
                located == expected,
                format!(
                    "located {located} (total {total}) vs exact {expected}, I = {:.6}",
                    cr.i_signed
                ),
            );
        }
        Err(PrueferError::HypothesisNotMet(lower)) => {
            report.push(
                "count",
                true,
                total >= lower,
                format!("lower bound only: located {total} >= {lower}"),
            );
        }
        Err(e) => return Err(e.into()),
    }

    let off = points.iter().filter(|pt| !pt.on_circle).count();
    report.push(
        "on-circle",
        hypothesis,
        off == 0,
        format!("{off} off-circle points"),
    );

    let non_simple = points.iter().filter(|pt| !pt.simple).count();
    report.push(
        "simple",
        true,
        non_simple == 0,
        format!("{non_simple} points with |dW/dz| <= 1e-6"),
    );

    if let HypothesisClass::KlausShawBreather { peak } = class {
        let bad: Vec<f64> = points
            .iter()
            .map(|pt| pt.z.arg())
            .filter(|&t| t < FRAC_PI_2 && t >= peak / 2.0 + 1e-9)
            .collect();
        report.push(
            "sector",
            true,
            bad.is_empty(),
            format!("first-quadrant angles above u0/2: {bad:?}"),
        );
        let regions = exclusion_regions(p)?;
        let inside = points
            .iter()
            .filter(|pt| regions.iter().any(|r| r.contains(pt.z)))
            .count();
        report.push(
            "exclusion",
            true,
            inside == 0,
            format!("{inside} points inside derived exclusion regions"),
        );
    } else {
        report.push("sector", false, true, "charge != 0".into());
        report.push("exclusion", false, true, "charge != 0".into());
    }

    // symmetry-orbit closure: UHP orbit members must be near-zeros of W and
    // located whenever they fall in the default region
    let mut closure_ok = true;
    let mut closure_notes = Vec::new();
    for pt in points {
        let zp = SpectralParameter::new(pt.z)?;
        for member in [zp.neg_conj(), zp.recip_conj()] {
            let mz = member.z();
            if (mz - pt.z).norm() < 1e-7 {
                continue;
            }
            let w = scattering::wronskian(&member, p, tols.ode)?;
            if w.norm() > 10.0 * tols.eigenvalue {
                closure_ok = false;
                closure_notes.push(format!("|W({mz})| = {:.2e}", w.norm()));
            }
            if SearchRegion::default().contains(mz)
                && !points.iter().any(|q| (q.z - mz).norm() < 1e-6)
            {
                closure_ok = false;
                closure_notes.push(format!("orbit member {mz} not located"));
            }
        }
    }
    report.push(
        "symmetry-closure",
        !points.is_empty(),
        closure_ok,
        closure_notes.join("; "),
    );

    // stationarity residual at circle eigenvalues
    let zm_applicable = match class {
        HypothesisClass::KinkMonotoneQ1 | HypothesisClass::KinkMonotoneQminus1 => true,
        HypothesisClass::KlausShawBreather { peak } => peak <= FRAC_PI_2 + 1e-12,
        HypothesisClass::General => false,
    } && !points.is_empty();
    let mut zm_ok = true;
    let mut zm_worst: f64 = 0.0;
    if zm_applicable {
        for pt in points.iter().filter(|pt| pt.on_circle) {
            let zp = SpectralParameter::new(pt.z)?;
            let eig = Eigenfunction::assemble(&zp, p, tols.ode).map_err(|e| {
                SearchError::Certification {
                    z: pt.z,
                    detail: e.to_string(),
                }
            })?;
            let r = krein::zero_momentum_check(&eig, p)?.norm();
            zm_worst = zm_worst.max(r);
            zm_ok &= r <= 1e-7;
        }
    }
    report.push(
        "zero-momentum",
        zm_applicable,
        zm_ok,
        format!("worst residual {zm_worst:.3e}"),
    );

    let mut kp_min = f64::INFINITY;
    for pt in points {
        kp_min = kp_min.min(pt.signature.bracket);
    }
    report.push(
        "krein-positivity",
        hypothesis && !points.is_empty(),
        kp_min > 1e-8,
        format!("min bracket {kp_min:.3e}"),
    );

    report.all_passed = report.checks.iter().all(|c| c.passed);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::KinkShape;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn zero_potential_contour_windings_vanish() {
        let p =
            PotentialProfile::from_closures(|_| 0.0, |_| 0.0, Some((-6.0, 6.0)), "zero").unwrap();
        for c in [
            Contour::annulus_sector(0.3, 2.0, 0.2, PI - 0.2),
            Contour::Circle {
                center: Complex64::new(0.0, 1.0),
                radius: 0.4,
            },
        ] {
            assert_eq!(winding_number(&c, &p, 1e-10).unwrap(), 0);
        }
    }

    #[test]
    fn bm_winding_around_i_is_one() {
        let p = PotentialProfile::buckingham_miller();
        let c = Contour::Circle {
            center: Complex64::new(0.0, 1.0),
            radius: 0.2,
        };
        assert_eq!(winding_number(&c, &p, 1e-10).unwrap(), 1);
        let c2 = Contour::Circle {
            center: Complex64::new(0.6, 0.5),
            radius: 0.15,
        };
        assert_eq!(winding_number(&c2, &p, 1e-10).unwrap(), 0);
    }

    #[test]
    fn bm_locate_finds_exactly_i() {
        let p = PotentialProfile::buckingham_miller();
        let pts = locate_eigenvalues(&SearchRegion::default(), &p, &tols()).unwrap();
        assert_eq!(
            pts.len(),
            1,
            "points: {:?}",
            pts.iter().map(|q| q.z).collect::<Vec<_>>()
        );
        assert!((pts[0].z - Complex64::new(0.0, 1.0)).norm() < 1e-6);
        assert!(pts[0].on_circle);
        assert!(pts[0].simple);
        let report = verify_spectrum(&pts, &p, &tols()).unwrap();
        assert!(report.all_passed, "{:#?}", report.checks);
    }

    #[test]
    fn breather_below_threshold_has_empty_spectrum() {
        // I = 0.9π is below the existence threshold
        let j_half_pi = 2.343_464_632_532_866_7;
        let width = 0.9 * PI / j_half_pi;
        let p = PotentialProfile::klaus_shaw_breather(FRAC_PI_2, width).unwrap();
        let pts = locate_eigenvalues(&SearchRegion::default(), &p, &tols()).unwrap();
        assert!(
            pts.is_empty(),
            "{:?}",
            pts.iter().map(|q| q.z).collect::<Vec<_>>()
        );
    }

    #[test]
    fn kink_spectrum_matches_count_and_symmetry() {
        let p = PotentialProfile::monotone_kink(KinkShape::AtanExp, 2.5).unwrap();
        let pts = locate_eigenvalues(&SearchRegion::default(), &p, &tols()).unwrap();
        assert_eq!(
            pts.len(),
            3,
            "{:?}",
            pts.iter().map(|q| q.z).collect::<Vec<_>>()
        );
        for pt in &pts {
            assert!(pt.on_circle, "off circle: {}", pt.z);
            assert!(pt.simple);
        }
        let report = verify_spectrum(&pts, &p, &tols()).unwrap();
        assert!(report.all_passed, "{:#?}", report.checks);
    }

    #[test]
    fn exclusion_regions_for_breather() {
        let p = PotentialProfile::klaus_shaw_breather(FRAC_PI_2, 2.0109).unwrap();
        let regions = exclusion_regions(&p).unwrap();
        assert_eq!(regions.len(), 4);
        let ball = regions
            .iter()
            .find_map(|r| match r {
                ExclusionRegion::OriginBall { radius } => Some(*radius),
                _ => None,
            })
            .unwrap();
        assert!(ball > 0.01, "ball radius {ball}");
        // one quadrant eigenvalue plus its reflection across the imaginary axis
        let pts = locate_eigenvalues(&SearchRegion::default(), &p, &tols()).unwrap();
        assert_eq!(pts.len(), 2);
        for pt in &pts {
            for r in &regions {
                assert!(!r.contains(pt.z), "{:?} contains {}", r, pt.z);
            }
        }
        let k = PotentialProfile::monotone_kink(KinkShape::AtanExp, 1.0).unwrap();
        assert!(matches!(
            exclusion_regions(&k),
            Err(SearchError::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn winding_zero_inside_exclusion_ball() {
        let p = PotentialProfile::klaus_shaw_breather(FRAC_PI_2, 2.0109).unwrap();
        let regions = exclusion_regions(&p).unwrap();
        let ball = regions
            .iter()
            .find_map(|r| match r {
                ExclusionRegion::OriginBall { radius } => Some(*radius),
                _ => None,
            })
            .unwrap();
        let r_hi = (0.9 * ball).max(0.07);
        let c = Contour::annulus_sector(0.06, r_hi, 0.01, PI - 0.01);
        assert_eq!(winding_number(&c, &p, 1e-9).unwrap(), 0);
    }
}
