//! Adaptive Verner 6(5) integrator with 5th-order continuous output.
//!
//! Nine-stage embedded pair (coefficients from Verner's "efficient" RKV65
//! family) plus one extra stage for the dense interpolant.  The state is a
//! flat `[f64; N]`; complex components are packed as (re, im) pairs by the
//! callers.  Steps may run in either direction (`x1 < x0` is allowed) and
//! the integrator always lands exactly on requested checkpoints, so
//! potentials with interior knots keep full order.

const STAGES: usize = 9;
const DENSE_STAGES: usize = 10;

#[rustfmt::skip]
const A: [[f64; STAGES]; STAGES] = [
    [0.0; 9],
    [0.6e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.923_996_296_296_296_2e-2, 7.669_337_037_037_037e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.35975e-1, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.318_683_415_233_148_4, 0.0, -5.042_058_063_628_562, 4.220_674_648_395_414, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-41.872_591_664_327_516, 0.0, 159.432_562_163_137_5, -122.119_213_565_010_03, 5.531_743_066_200_054, 0.0, 0.0, 0.0, 0.0],
    [-54.430_156_935_316_504, 0.0, 207.067_251_365_018_48, -158.610_813_784_59, 6.991_816_585_950_242, -1.859_723_106_220_323_4e-2, 0.0, 0.0, 0.0],
    [-54.663_741_787_281_98, 0.0, 207.952_806_255_389_36, -159.288_957_474_499_5, 7.018_743_740_796_944, -1.833_878_590_504_572_2e-2, -5.119_484_997_882_099e-4, 0.0, 0.0],
    [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0],
];

#[rustfmt::skip]
const B_HIGH: [f64; STAGES] = [
    3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7,
    4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0,
];

#[rustfmt::skip]
const B_LOW: [f64; STAGES] = [
    4.909_967_648_382_49e-2, 0.0, 0.0, 0.225_111_222_951_652_42, 0.469_468_225_302_956_2,
    0.806_579_224_998_886_8, 0.0, -0.607_119_489_177_796, 5.686_113_944_047_569_6e-2,
];

#[rustfmt::skip]
const C: [f64; STAGES] = [
    0.0, 0.6e-1, 9.593_333_333_333_333e-2, 0.1439, 0.4973, 0.9725, 0.9995, 1.0, 1.0,
];

// One extra stage at the step midpoint feeds the 5th-order interpolant.
#[rustfmt::skip]
const A_DENSE: [f64; DENSE_STAGES] = [
    1.652_415_901_357_280_6e-2, 0.0, 0.0, 0.305_312_818_751_417_9, 0.207_120_093_820_197_9,
    -1.293_879_140_655_123, 57.119_884_115_881_49, -55.879_792_075_109_32, 2.483_002_829_776_601_4e-2, 0.0,
];
const C_DENSE: f64 = 0.5;

// Interpolation polynomial coefficients: cont_i(s) = s * poly(s), one row per stage.
#[rustfmt::skip]
const B_DENSE: [[f64; 6]; DENSE_STAGES] = [
    [1.0, -5.308_169_607_103_577, 10.181_680_448_958_68, -7.520_036_991_611_715, 0.934_048_536_863_116_1, 0.746_867_191_577_065],
    [0.0; 6],
    [0.0; 6],
    [0.0, 6.272_050_253_212_501, -16.026_181_474_677_46, 12.844_356_324_519_618, -1.148_794_504_476_759_1, -1.683_168_143_014_549_8],
    [0.0, 6.876_491_702_846_304, -24.635_767_260_846_333, 33.210_786_483_797_17, -17.494_615_282_636_44, 2.464_041_475_806_649_6],
    [0.0, -35.544_451_710_599_6, 165.701_617_019_024_2, -385.463_539_549_114_3, 442.432_413_701_570_17, -182.720_642_991_211_2],
    [0.0, 1_918.654_856_698_011_4, -9_268.121_508_966_042, 20_858.337_028_772_55, -22_645.827_671_584_81, 8_960.474_176_055_992],
    [0.0, -1_883.069_802_132_718_2, 9_101.025_187_200_634, -20_473.188_551_959_534, 22_209.765_551_256_532, -8_782.168_250_963_5],
    [0.0, 0.119_024_796_351_236_43, -0.125_026_967_050_393_76, 1.779_956_919_394_999_1, -4.660_932_123_043_763, 2.886_977_374_347_921],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];

/// One accepted step with everything needed to interpolate inside it.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub x0: f64,
    pub h: f64,
    pub y0: [f64; N],
    k: [[f64; N]; DENSE_STAGES],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the continuous extension at `x` inside `[x0, x0+h]`.
    pub fn eval(&self, x: f64) -> [f64; N] {
        let s = (x - self.x0) / self.h;
        let mut y = self.y0;
        for (i, row) in B_DENSE.iter().enumerate() {
            let mut c = row[5];
            for j in (0..5).rev() {
                c = c * s + row[j];
            }
            c *= s;
            let hk = c * self.h;
            for n in 0..N {
                y[n] += hk * self.k[i][n];
            }
        }
        y
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = if self.h >= 0.0 {
            (self.x0, self.x0 + self.h)
        } else {
            (self.x0 + self.h, self.x0)
        };
        x >= lo - 1e-12 && x <= hi + 1e-12
    }
}

/// Piecewise-polynomial solution over the whole integration interval.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    pub x_end: f64,
    pub y_end: [f64; N],
}

impl<const N: usize> DenseSolution<N> {
    /// Interpolated state at `x`; clamps to the nearest endpoint outside the span.
    pub fn eval(&self, x: f64) -> [f64; N] {
        if self.steps.is_empty() {
            return self.y_end;
        }
        let forward = self.steps[0].h >= 0.0;
        // binary search on step starts
        let mut lo = 0usize;
        let mut hi = self.steps.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let after = if forward {
                x >= self.steps[mid].x0
            } else {
                x <= self.steps[mid].x0
            };
            if after {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.steps[lo].eval(x)
    }

    pub fn x_start(&self) -> f64 {
        self.steps.first().map_or(self.x_end, |s| s.x0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at x = {x} (|h| = {h:.3e}); tolerance unreachable")]
    StepSizeUnderflow { x: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at x = {x}")]
    MaxSteps { x: f64, max_steps: usize },
}

pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Points the integrator must land on exactly (interpolation knots,
    /// discontinuities of higher derivatives).
    pub checkpoints: Vec<f64>,
    pub record_dense: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 2_000_000,
            checkpoints: Vec::new(),
            record_dense: false,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol * 1e-2,
            ..Default::default()
        }
    }

    pub fn dense(mut self) -> Self {
        self.record_dense = true;
        self
    }

    pub fn checkpoints(mut self, pts: &[f64]) -> Self {
        self.checkpoints = pts.to_vec();
        self
    }
}

/// Integrate `dy/dx = f(x, y)` from `x0` to `x1` (either direction).
pub fn integrate<const N: usize, F>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
) -> Result<DenseSolution<N>, OdeError>
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut checkpoints: Vec<f64> = opts
        .checkpoints
        .iter()
        .copied()
        .filter(|&c| (c - x0) * dir > 1e-14 && (x1 - c) * dir > 1e-14)
        .collect();
    checkpoints.sort_by(|a, b| (dir * a).partial_cmp(&(dir * b)).unwrap());
    checkpoints.push(x1);

    let mut x = x0;
    let mut y = y0;
    let mut dydx = [0.0; N];
    f(x, &y, &mut dydx);

    let mut h = initial_step(&f, x, &y, &dydx, dir, span, opts);
    let mut steps = Vec::new();
    let mut nsteps = 0usize;
    let mut k = [[0.0f64; N]; DENSE_STAGES];
    let mut next_ck = 0usize;

    while (x1 - x) * dir > 1e-14 * (1.0 + x.abs()) {
        if nsteps >= opts.max_steps {
            return Err(OdeError::MaxSteps {
                x,
                max_steps: opts.max_steps,
            });
        }
        nsteps += 1;

        // do not step over the next checkpoint
        while next_ck < checkpoints.len() && (checkpoints[next_ck] - x) * dir <= 1e-14 * (1.0 + x.abs()) {
            next_ck += 1;
        }
        let target = checkpoints[next_ck.min(checkpoints.len() - 1)];
        let remaining = (target - x) * dir;
        let mut clipped = false;
        if h >= remaining {
            h = remaining;
            clipped = true;
        }
        if h < 1e-14 * (1.0 + x.abs()) {
            return Err(OdeError::StepSizeUnderflow { x, h });
        }
        let hs = dir * h;

        k[0] = dydx;
        for i in 1..STAGES {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let w = A[i][j] * hs;
                if w != 0.0 {
                    for n in 0..N {
                        ys[n] += w * kj[n];
                    }
                }
            }
            let mut ki = [0.0; N];
            f(x + C[i] * hs, &ys, &mut ki);
            k[i] = ki;
        }

        let mut y_high = y;
        let mut err_vec = [0.0f64; N];
        for i in 0..STAGES {
            for n in 0..N {
                y_high[n] += B_HIGH[i] * hs * k[i][n];
                err_vec[n] += (B_HIGH[i] - B_LOW[i]) * hs * k[i][n];
            }
        }

        let mut err_norm = 0.0f64;
        for n in 0..N {
            let sc = opts.atol + opts.rtol * y[n].abs().max(y_high[n].abs());
            err_norm = err_norm.max((err_vec[n] / sc).abs());
        }

        if err_norm <= 1.0 {
            if opts.record_dense {
                // extra midpoint stage completes the interpolant
                let mut ys = y;
                for (j, adj) in A_DENSE.iter().enumerate() {
                    let w = adj * hs;
                    if w != 0.0 {
                        for n in 0..N {
                            ys[n] += w * k[j][n];
                        }
                    }
                }
                let mut k9 = [0.0; N];
                f(x + C_DENSE * hs, &ys, &mut k9);
                k[9] = k9;
                steps.push(DenseStep {
                    x0: x,
                    h: hs,
                    y0: y,
                    k,
                });
            }
            x = if clipped { target } else { x + hs };
            y = y_high;
            // stage 9 is evaluated at (x0 + h, y_high): FSAL
            dydx = k[8];
        }

        let scale = if err_norm == 0.0 {
            10.0
        } else {
            (0.9 * err_norm.powf(-1.0 / 6.0)).clamp(0.2, 10.0)
        };
        h = (h * scale).min(span);
    }

    Ok(DenseSolution {
        steps,
        x_end: x,
        y_end: y,
    })
}

fn initial_step<const N: usize, F>(
    f: &F,
    x0: f64,
    y0: &[f64; N],
    dydx0: &[f64; N],
    dir: f64,
    span: f64,
    opts: &OdeOptions,
) -> f64
where
    F: Fn(f64, &[f64; N], &mut [f64; N]),
{
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for n in 0..N {
        let sc = opts.atol + opts.rtol * y0[n].abs();
        d0 = d0.max((y0[n] / sc).abs());
        d1 = d1.max((dydx0[n] / sc).abs());
    }
    let mut h = if d1 <= 1e-10 {
        1e-6 * span.max(1.0)
    } else {
        0.01 * (d0.max(1.0) / d1)
    };
    h = h.min(span);
    // one Euler probe to bound the second derivative
    let mut y1 = *y0;
    for n in 0..N {
        y1[n] += dir * h * dydx0[n];
    }
    let mut d2v = [0.0; N];
    f(x0 + dir * h, &y1, &mut d2v);
    let mut d2: f64 = 0.0;
    for n in 0..N {
        let sc = opts.atol + opts.rtol * y0[n].abs();
        d2 = d2.max(((d2v[n] - dydx0[n]) / sc).abs() / h);
    }
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(1.0 / 6.0)
    };
    h.min(h1).min(span).max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_consistency() {
        for i in 0..STAGES {
            let row: f64 = A[i].iter().sum();
            assert!((row - C[i]).abs() < 1e-13, "row {i} sum {row} != c {}", C[i]);
        }
        let sh: f64 = B_HIGH.iter().sum();
        let sl: f64 = B_LOW.iter().sum();
        assert!((sh - 1.0).abs() < 1e-13);
        assert!((sl - 1.0).abs() < 1e-13);
        // quadrature-type order conditions for both weight rows
        for p in 1..=5 {
            let m: f64 = (0..STAGES).map(|i| B_HIGH[i] * C[i].powi(p)).sum();
            assert!(
                (m - 1.0 / (p as f64 + 1.0)).abs() < 1e-12,
                "b_high order condition p={p}"
            );
        }
        for p in 1..=4 {
            let m: f64 = (0..STAGES).map(|i| B_LOW[i] * C[i].powi(p)).sum();
            assert!((m - 1.0 / (p as f64 + 1.0)).abs() < 1e-12);
        }
        let sd: f64 = A_DENSE.iter().sum();
        assert!((sd - C_DENSE).abs() < 1e-13);
        // interpolant reproduces the step endpoint
        for i in 0..DENSE_STAGES {
            let cont1: f64 = B_DENSE[i].iter().sum();
            let b = if i < STAGES { B_HIGH[i] } else { 0.0 };
            assert!((cont1 - b).abs() < 1e-10, "dense endpoint stage {i}");
        }
    }

    #[test]
    fn exponential_growth_and_dense_output() {
        let opts = OdeOptions::with_tol(1e-11).dense();
        let sol = integrate(|_, y, dy| dy[0] = y[0], 0.0, 2.0, [1.0], &opts).unwrap();
        assert!((sol.y_end[0] - 2.0f64.exp()).abs() < 1e-10);
        for i in 0..=40 {
            let x = 0.05 * i as f64;
            let y = sol.eval(x);
            assert!(
                (y[0] - x.exp()).abs() < 5e-10,
                "dense output at x={x}: {} vs {}",
                y[0],
                x.exp()
            );
        }
    }

    #[test]
    fn backward_integration() {
        let opts = OdeOptions::with_tol(1e-11);
        let sol = integrate(|x, _, dy| dy[0] = x.cos(), 3.0, -1.0, [3.0f64.sin()], &opts).unwrap();
        assert!((sol.y_end[0] - (-1.0f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn sixth_order_convergence() {
        // fixed-tolerance sweep: halving tol should cut the error accordingly
        let f = |x: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = -y[1] * x.sin() + y[0] * 0.1;
            dy[1] = y[0] * x.sin() + y[1] * 0.1;
        };
        let mut prev = f64::INFINITY;
        for tol in [1e-6, 1e-8, 1e-10] {
            let opts = OdeOptions::with_tol(tol);
            let sol = integrate(f, 0.0, 5.0, [1.0, 0.0], &opts).unwrap();
            // reference at tight tolerance
            let r = integrate(f, 0.0, 5.0, [1.0, 0.0], &OdeOptions::with_tol(1e-13)).unwrap();
            let err = ((sol.y_end[0] - r.y_end[0]).powi(2) + (sol.y_end[1] - r.y_end[1]).powi(2)).sqrt();
            assert!(err < prev.max(1e-9) * 1.5, "tol {tol} err {err}");
            assert!(err < tol * 1e3, "tol {tol} err {err}");
            prev = err;
        }
    }

    #[test]
    fn lands_on_checkpoints() {
        let opts = OdeOptions {
            checkpoints: vec![0.3, 1.1],
            record_dense: true,
            ..OdeOptions::with_tol(1e-10)
        };
        let sol = integrate(|_, y, dy| dy[0] = y[0], 0.0, 2.0, [1.0], &opts).unwrap();
        let starts: Vec<f64> = sol.steps.iter().map(|s| s.x0).collect();
        assert!(starts.iter().any(|&s| (s - 0.3).abs() < 1e-12));
        assert!(starts.iter().any(|&s| (s - 1.1).abs() < 1e-12));
    }
}
