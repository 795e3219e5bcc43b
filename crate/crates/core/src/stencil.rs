//! Central finite differences on `[0, π]` with reflection ghosts at both ends.

/// Behaviour of a sampled function under reflection through an end point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(p − s) = f(p + s)`
    Even,
    /// `f(p − s) = 2 f(p) − f(p + s)`
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Second,
    Fourth,
}

/// First and second derivatives of equally spaced samples `f_0 … f_K`.
///
/// Differences are taken relative to the centre value so that constant data
/// differentiates to exactly zero.
pub fn derivatives(f: &[f64], h: f64, start: Parity, end: Parity, order: Order) -> (Vec<f64>, Vec<f64>) {
    let mut d1 = vec![0.0; f.len()];
    let mut d2 = vec![0.0; f.len()];
    derivatives_into(f, h, start, end, order, &mut d1, &mut d2);
    (d1, d2)
}

pub fn derivatives_into(
    f: &[f64],
    h: f64,
    start: Parity,
    end: Parity,
    order: Order,
    d1: &mut [f64],
    d2: &mut [f64],
) {
    let len = f.len();
    assert!(len >= 3, "need at least three samples");
    let last = len - 1;
    let at = |j: isize| -> f64 {
        if j < 0 {
            let m = f[(-j) as usize];
            match start {
                Parity::Even => m,
                Parity::Odd => 2.0 * f[0] - m,
            }
        } else if j as usize > last {
            let m = f[2 * last - j as usize];
            match end {
                Parity::Even => m,
                Parity::Odd => 2.0 * f[last] - m,
            }
        } else {
            f[j as usize]
        }
    };
    let inv12h = 1.0 / (12.0 * h);
    let inv12h2 = 1.0 / (12.0 * h * h);
    let inv2h = 0.5 / h;
    let invh2 = 1.0 / (h * h);
    for k in 0..len {
        let j = k as isize;
        let c = f[k];
        let (p1, m1) = (at(j + 1) - c, at(j - 1) - c);
        match order {
            Order::Fourth => {
                let (p2, m2) = (at(j + 2) - c, at(j - 2) - c);
                d1[k] = (8.0 * (p1 - m1) - (p2 - m2)) * inv12h;
                d2[k] = (16.0 * (p1 + m1) - (p2 + m2)) * inv12h2;
            }
            Order::Second => {
                d1[k] = (p1 - m1) * inv2h;
                d2[k] = (p1 + m1) * invh2;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(k: usize) -> Vec<f64> {
        (0..=k).map(|i| i as f64 * PI / k as f64).collect()
    }

    #[test]
    fn constants_differentiate_to_zero() {
        let f = vec![-0.7312; 33];
        let (d1, d2) = derivatives(&f, PI / 32.0, Parity::Even, Parity::Even, Order::Fourth);
        assert!(d1.iter().chain(&d2).all(|&x| x == 0.0));
    }

    #[test]
    fn fourth_order_on_even_function() {
        let err = |k: usize| {
            let th = grid(k);
            let f: Vec<f64> = th.iter().map(|t| (2.0 * t).cos() + 0.3 * (3.0 * t).cos()).collect();
            let (d1, d2) = derivatives(&f, PI / k as f64, Parity::Even, Parity::Even, Order::Fourth);
            th.iter()
                .enumerate()
                .map(|(i, t)| {
                    let e1 = d1[i] + 2.0 * (2.0 * t).sin() + 0.9 * (3.0 * t).sin();
                    let e2 = d2[i] + 4.0 * (2.0 * t).cos() + 2.7 * (3.0 * t).cos();
                    e1.abs().max(e2.abs())
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn odd_reflection_about_end_values() {
        // θ ↦ θ + 0.1 sin 2θ is odd about 0 and about π
        let k = 128;
        let th = grid(k);
        let f: Vec<f64> = th.iter().map(|t| t + 0.1 * (2.0 * t).sin()).collect();
        let (d1, _) = derivatives(&f, PI / k as f64, Parity::Odd, Parity::Odd, Order::Fourth);
        for (i, t) in th.iter().enumerate() {
            assert!((d1[i] - (1.0 + 0.2 * (2.0 * t).cos())).abs() < 1e-6);
        }
    }

    #[test]
    fn second_order_converges_quadratically() {
        let err = |k: usize| {
            let th = grid(k);
            let f: Vec<f64> = th.iter().map(|t| (2.0 * t).cos()).collect();
            let (_, d2) = derivatives(&f, PI / k as f64, Parity::Even, Parity::Even, Order::Second);
            th.iter()
                .enumerate()
                .map(|(i, t)| (d2[i] + 4.0 * (2.0 * t).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 3.8 && ratio < 4.2, "ratio {ratio}");
    }
}
