//! Shared numeric machinery: the adaptive integrator, quadrature, monotone
//! interpolation, and scalar root refinement.

pub mod interp;
pub mod quad;
pub mod rk;

/// Refine a bracketed root of `f` by the Illinois variant of regula falsi
/// (secant steps safeguarded by bisection).  `fa` and `fb` must have
/// opposite signs.
pub fn refine_bracket(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    max_iter: usize,
) -> f64 {
    debug_assert!(fa * fb <= 0.0, "root not bracketed");
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut side = 0i32;
    for _ in 0..max_iter {
        if (b - a).abs() < xtol {
            break;
        }
        let denom = fb - fa;
        let mut m = if denom.abs() > 1e-300 {
            (a * fb - b * fa) / denom
        } else {
            0.5 * (a + b)
        };
        // keep the iterate strictly interior
        let lo = a.min(b);
        let hi = a.max(b);
        if !(m > lo && m < hi) {
            m = 0.5 * (a + b);
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm * fa < 0.0 {
            b = m;
            fb = fm;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = m;
            fa = fm;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refines_cosine_root() {
        let f = |x: f64| x.cos();
        let r = refine_bracket(f, 1.0, 2.0, f(1.0), f(2.0), 1e-14, 200);
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn refines_step_like_jump() {
        // sharp transition: converges to the jump location
        let f = |x: f64| ((x - 0.7321) * 1e8).tanh();
        let r = refine_bracket(f, 0.0, 1.0, f(0.0), f(1.0), 1e-12, 300);
        assert!((r - 0.7321).abs() < 1e-7);
    }
}
