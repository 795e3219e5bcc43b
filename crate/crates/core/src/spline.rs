//! Cubic splines for graphs over `[0, π]` that are even about both poles.
//!
//! Clamping both end slopes to zero makes the spline coincide with the
//! periodic spline of the evenly reflected data, so it stays `C²` across the
//! poles.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("nodes must be strictly increasing (violated at index {0})")]
    NotIncreasing(usize),
    #[error("need at least two nodes and as many values")]
    TooFew,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvenSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl EvenSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self, SplineError> {
        let len = x.len();
        if len < 2 || y.len() != len {
            return Err(SplineError::TooFew);
        }
        if let Some(i) = (1..len).find(|&i| !(x[i] > x[i - 1])) {
            return Err(SplineError::NotIncreasing(i));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..len - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // tridiagonal system for the node second derivatives
        let mut sub = vec![0.0; len];
        let mut diag = vec![0.0; len];
        let mut sup = vec![0.0; len];
        let mut rhs = vec![0.0; len];
        diag[0] = 2.0 * h[0];
        sup[0] = h[0];
        rhs[0] = 6.0 * slope[0];
        for i in 1..len - 1 {
            sub[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let last = len - 1;
        sub[last] = h[last - 1];
        diag[last] = 2.0 * h[last - 1];
        rhs[last] = -6.0 * slope[last - 1];

        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn interval(&self, t: f64) -> usize {
        let last = self.x.len() - 2;
        match self.x.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => i.min(last),
            Err(0) => 0,
            Err(i) => (i - 1).min(last),
        }
    }

    /// Value, first and second derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let i = self.interval(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - t, t - x0);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let c0 = self.y[i] / h - m0 * h / 6.0;
        let c1 = self.y[i + 1] / h - m1 * h / 6.0;
        let value = (m0 * a * a * a + m1 * b * b * b) / (6.0 * h) + c0 * a + c1 * b;
        let d1 = (m1 * b * b - m0 * a * a) / (2.0 * h) - c0 + c1;
        let d2 = (m0 * a + m1 * b) / h;
        (value, d1, d2)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let len = diag.len();
    let mut c = vec![0.0; len];
    let mut d = vec![0.0; len];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..len {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; len];
    out[len - 1] = d[len - 1];
    for i in (0..len - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}
