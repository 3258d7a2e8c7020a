//! Monotonicity-preserving C¹ cubic interpolation (Fritsch–Carlson slopes).

#[derive(Debug, Clone)]
pub struct CubicHermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterpError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("abscissae must be strictly increasing (violation near index {0})")]
    NotIncreasing(usize),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

impl CubicHermite {
    pub fn fitted(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, InterpError> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(InterpError::TooFewSamples(n.min(ys.len())));
        }
        for i in 0..n {
            if !xs[i].is_finite() || !ys[i].is_finite() {
                return Err(InterpError::NonFinite(i));
            }
            if i > 0 && xs[i] <= xs[i - 1] {
                return Err(InterpError::NotIncreasing(i));
            }
        }
        let mut slopes = vec![0.0; n - 1];
        for i in 0..n - 1 {
            slopes[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        }
        let mut ds = vec![0.0; n];
        ds[0] = slopes[0];
        ds[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                ds[i] = 0.0;
            } else {
                // harmonic mean keeps the interpolant monotone on each panel
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                ds[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        // clamp endpoint slopes (Fritsch-Carlson condition)
        for (i, edge) in [(0usize, 0usize), (n - 1, n - 2)] {
            if ds[i] * slopes[edge] <= 0.0 {
                ds[i] = 0.0;
            } else if ds[i].abs() > 3.0 * slopes[edge].abs() {
                ds[i] = 3.0 * slopes[edge];
            }
        }
        Ok(CubicHermite { xs, ys, ds })
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let dh00 = 6.0 * t * t - 6.0 * t;
        let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * t * t - 2.0 * t;
        (dh00 * self.ys[i] + dh01 * self.ys[i + 1]) / h + dh10 * self.ds[i] + dh11 * self.ds[i + 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.37).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let c = CubicHermite::fitted(xs, ys).unwrap();
        for i in 0..=100 {
            let x = 0.07 * i as f64;
            assert!((c.eval(x) - (2.0 * x - 1.0)).abs() < 1e-12);
            assert!((c.deriv(x) - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let xs: Vec<f64> = (0..40).map(|i| -6.0 + 0.3 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 4.0 * (x.exp()).atan()).collect();
        let c = CubicHermite::fitted(xs.clone(), ys).unwrap();
        let mut prev = c.eval(xs[0]);
        for i in 1..=500 {
            let x = xs[0] + (xs[39] - xs[0]) * i as f64 / 500.0;
            let v = c.eval(x);
            assert!(v >= prev - 1e-12, "not monotone at {x}");
            prev = v;
        }
    }

    #[test]
    fn rejects_unsorted_input() {
        let e = CubicHermite::fitted(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 2.0]);
        assert!(matches!(e, Err(InterpError::NotIncreasing(2))));
    }
}
