//! Curvature functions on the positive cone `Γ₊ = {κ : κ_i > 0}`.
//!
//! Every shipped function is symmetric, monotone, homogeneous of degree one
//! and normalized so that `F(1, …, 1) = 1`. The convex family is the power
//! means `M_p` with `p ≥ 1`; the geometric mean is concave and ships only as
//! a negative control for the inequality suite.

use std::fmt;

use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

/// Stack buffer for κ-vectors; hypersurface dimensions beyond 8 spill to the heap.
pub type KappaBuf = SmallVec<[f64; 8]>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("κ = {kappa:?} is not in the open positive cone")]
    OutsideCone { kappa: Vec<f64> },
    #[error("expected {expected} principal curvatures, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("power-mean exponent {0} < 1 would not be convex")]
    NonConvexExponent(f64),
    #[error("dimension n = {0} must be at least 2")]
    SmallDimension(usize),
    #[error("unknown curvature function {0:?} (expected pm:1, pm:2, pm:4, pm:8, geo)")]
    UnknownName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Convex,
    Concave,
    Linear,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    PowerMean { p: f64 },
    Geometric,
    Dual(Box<CurvatureFunction>),
}

/// Value and directional derivatives of `F` at `(κ_mer, κ_rot, …, κ_rot)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialValue {
    pub value: f64,
    /// `∂F/∂κ` in the meridian slot.
    pub d_mer: f64,
    /// `∂F/∂κ` in any one of the `n − 1` rotational slots.
    pub d_rot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureFunction {
    n: usize,
    kind: Kind,
    classification: Classification,
    label: String,
}

impl CurvatureFunction {
    /// `F(κ) = ((1/n) Σ κ_i^p)^{1/p}`.
    pub fn power_mean(p: f64, n: usize) -> Result<Self, CurvatureError> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(CurvatureError::NonConvexExponent(p));
        }
        if n < 2 {
            return Err(CurvatureError::SmallDimension(n));
        }
        let classification = if p == 1.0 {
            Classification::Linear
        } else {
            Classification::Convex
        };
        Ok(Self {
            n,
            kind: Kind::PowerMean { p },
            classification,
            label: format!("pm:{p}"),
        })
    }

    /// `F(κ) = (Π κ_i)^{1/n}`; concave, so it violates the convex-case inequalities.
    pub fn geometric_mean(n: usize) -> Result<Self, CurvatureError> {
        if n < 2 {
            return Err(CurvatureError::SmallDimension(n));
        }
        Ok(Self {
            n,
            kind: Kind::Geometric,
            classification: Classification::Concave,
            label: "geo".to_string(),
        })
    }

    /// Parses the config names `pm:<p>` and `geo`.
    pub fn parse(name: &str, n: usize) -> Result<Self, CurvatureError> {
        let name = name.trim();
        if name == "geo" {
            return Self::geometric_mean(n);
        }
        match name.strip_prefix("pm:").map(str::parse::<u32>) {
            Some(Ok(p @ (1 | 2 | 4 | 8))) => Self::power_mean(f64::from(p), n),
            _ => Err(CurvatureError::UnknownName(name.to_string())),
        }
    }

    /// The inverse function `F̃(κ) = 1 / F(κ₁⁻¹, …, κ_n⁻¹)`.
    pub fn dual(&self) -> Self {
        let classification = match &self.kind {
            Kind::Dual(inner) => inner.classification,
            _ => match self.classification {
                Classification::Convex | Classification::Linear => Classification::Concave,
                _ => Classification::Unclassified,
            },
        };
        Self {
            n: self.n,
            classification,
            label: format!("dual({})", self.label),
            kind: Kind::Dual(Box::new(self.clone())),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_domain(&self, kappa: &[f64]) -> Result<(), CurvatureError> {
        if kappa.len() != self.n {
            return Err(CurvatureError::Dimension {
                expected: self.n,
                got: kappa.len(),
            });
        }
        if kappa.iter().all(|&k| k > 0.0 && k.is_finite()) {
            Ok(())
        } else {
            Err(CurvatureError::OutsideCone {
                kappa: kappa.to_vec(),
            })
        }
    }

    pub fn eval(&self, kappa: &[f64]) -> Result<f64, CurvatureError> {
        self.check_domain(kappa)?;
        Ok(self.eval_unchecked(kappa))
    }

    /// Gradient `(F_1, …, F_n)` with `F_i = ∂F/∂κ_i`.
    pub fn grad(&self, kappa: &[f64]) -> Result<Vec<f64>, CurvatureError> {
        let mut g = vec![0.0; self.n];
        self.eval_grad_into(kappa, &mut g)?;
        Ok(g)
    }

    /// Evaluates `F` and writes its gradient into `grad`.
    pub fn eval_grad_into(&self, kappa: &[f64], grad: &mut [f64]) -> Result<f64, CurvatureError> {
        self.check_domain(kappa)?;
        assert_eq!(grad.len(), self.n);
        Ok(self.eval_grad_unchecked(kappa, grad))
    }

    /// `F` at a point of an axially symmetric hypersurface, where the
    /// rotational principal curvature has multiplicity `n − 1`.
    pub fn eval_axial(&self, k_mer: f64, k_rot: f64) -> Result<AxialValue, CurvatureError> {
        let ok = |k: f64| k > 0.0 && k.is_finite();
        if !(ok(k_mer) && ok(k_rot)) {
            let mut kappa = vec![k_rot; self.n];
            kappa[0] = k_mer;
            return Err(CurvatureError::OutsideCone { kappa });
        }
        Ok(self.axial_unchecked(k_mer, k_rot))
    }

    /// Value only, for `κ = (k_mer, k_rot, …, k_rot)` already known to lie in the cone.
    pub fn axial_value_unchecked(&self, k_mer: f64, k_rot: f64) -> f64 {
        let n = self.n as f64;
        let rest = n - 1.0;
        match &self.kind {
            Kind::PowerMean { p } if *p == 1.0 => (k_mer + rest * k_rot) / n,
            Kind::PowerMean { p } => root((pow(k_mer, *p) + rest * pow(k_rot, *p)) / n, *p),
            Kind::Geometric => ((k_mer.ln() + rest * k_rot.ln()) / n).exp(),
            Kind::Dual(inner) => 1.0 / inner.axial_value_unchecked(1.0 / k_mer, 1.0 / k_rot),
        }
    }

    fn axial_unchecked(&self, k_mer: f64, k_rot: f64) -> AxialValue {
        let n = self.n as f64;
        let rest = n - 1.0;
        match &self.kind {
            Kind::PowerMean { p } => {
                let p = *p;
                let value = if p == 1.0 {
                    (k_mer + rest * k_rot) / n
                } else {
                    root((pow(k_mer, p) + rest * pow(k_rot, p)) / n, p)
                };
                let d = |k: f64| if p == 1.0 { 1.0 / n } else { pow(k / value, p - 1.0) / n };
                AxialValue {
                    value,
                    d_mer: d(k_mer),
                    d_rot: d(k_rot),
                }
            }
            Kind::Geometric => {
                let value = ((k_mer.ln() + rest * k_rot.ln()) / n).exp();
                AxialValue {
                    value,
                    d_mer: value / (n * k_mer),
                    d_rot: value / (n * k_rot),
                }
            }
            Kind::Dual(inner) => {
                let a = inner.axial_unchecked(1.0 / k_mer, 1.0 / k_rot);
                let w = 1.0 / (a.value * a.value);
                AxialValue {
                    value: 1.0 / a.value,
                    d_mer: a.d_mer * w / (k_mer * k_mer),
                    d_rot: a.d_rot * w / (k_rot * k_rot),
                }
            }
        }
    }

    fn eval_unchecked(&self, kappa: &[f64]) -> f64 {
        let n = self.n as f64;
        match &self.kind {
            Kind::PowerMean { p } => {
                let mean = kappa.iter().map(|&k| pow(k, *p)).sum::<f64>() / n;
                root(mean, *p)
            }
            Kind::Geometric => (kappa.iter().map(|k| k.ln()).sum::<f64>() / n).exp(),
            Kind::Dual(inner) => {
                let inv: KappaBuf = kappa.iter().map(|k| 1.0 / k).collect();
                1.0 / inner.eval_unchecked(&inv)
            }
        }
    }

    fn eval_grad_unchecked(&self, kappa: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.n as f64;
        match &self.kind {
            Kind::PowerMean { p } => {
                let f = self.eval_unchecked(kappa);
                for (g, &k) in grad.iter_mut().zip(kappa) {
                    *g = pow(k / f, p - 1.0) / n;
                }
                f
            }
            Kind::Geometric => {
                let f = self.eval_unchecked(kappa);
                for (g, &k) in grad.iter_mut().zip(kappa) {
                    *g = f / (n * k);
                }
                f
            }
            Kind::Dual(inner) => {
                // F̃_i(κ) = F_i(κ⁻¹) / (F(κ⁻¹)² κ_i²)
                let inv: KappaBuf = kappa.iter().map(|k| 1.0 / k).collect();
                let f_inv = inner.eval_grad_unchecked(&inv, grad);
                for (g, &k) in grad.iter_mut().zip(kappa) {
                    *g /= f_inv * f_inv * k * k;
                }
                1.0 / f_inv
            }
        }
    }
}

impl fmt::Display for CurvatureFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n = {})", self.label, self.n)
    }
}

fn pow(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

fn root(x: f64, p: f64) -> f64 {
    match p as u32 {
        _ if p.fract() != 0.0 => x.powf(1.0 / p),
        1 => x,
        2 => x.sqrt(),
        4 => x.sqrt().sqrt(),
        8 => x.sqrt().sqrt().sqrt(),
        _ => x.powf(1.0 / p),
    }
}

/// Log-uniform sample from `(0.1, 10)ⁿ`, sorted ascending.
pub fn sample_kappa(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut k: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect();
    k.sort_by(f64::total_cmp);
    k
}

/// Outcome of one inequality family across all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// Smallest observed `rhs − lhs`; negative means a violation.
    pub worst_margin: f64,
    pub violations: usize,
    pub evaluated: usize,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            worst_margin: f64::INFINITY,
            violations: 0,
            evaluated: 0,
        }
    }

    fn record(&mut self, margin: f64, tol: f64) {
        self.evaluated += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if !(margin >= -tol) {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub label: String,
    pub n: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub checks: Vec<CheckResult>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Plain-text table, one row per check.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "# {} n={} samples={} tol={:e}\n{:<22} {:>24} {:>10} {:>10} {}\n",
            self.label, self.n, self.samples, self.tolerance, "check", "worst_margin", "violations", "evaluated", "status"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<22} {:>24.16e} {:>10} {:>10} {}\n",
                c.name,
                c.worst_margin,
                c.violations,
                c.evaluated,
                if c.passed() { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Margin slack that absorbs rounding only.
pub const SUITE_TOL: f64 = 1e-10;

/// Checks the structural invariants of `F` and the convex-case inequality set
/// on `samples` log-uniform points of `(0.1, 10)ⁿ`. Violations are counted,
/// never raised.
pub fn property_suite(f: &CurvatureFunction, samples: usize, rng: &mut impl Rng) -> PropertyReport {
    let n = f.n();
    let nf = n as f64;
    let tol = SUITE_TOL;
    let dual = f.dual();

    let mut symmetry = CheckResult::new("symmetry");
    let mut homogeneity = CheckResult::new("homogeneity");
    let mut normalization = CheckResult::new("normalization");
    let mut monotone = CheckResult::new("monotonicity");
    let mut c32_lo = CheckResult::new("H/n <= F");
    let mut c32_hi = CheckResult::new("F <= k_n");
    let mut c33 = CheckResult::new("sum F_i <= 1");
    let mut c36 = CheckResult::new("F_i ordered");
    let mut c39_lo = CheckResult::new("k_n/n <= F");
    let mut c39_euler = CheckResult::new("Euler relation");
    let mut c39_hi = CheckResult::new("F <= n F_n k_n");
    let mut c310_lo = CheckResult::new("1/n^2 <= F_n");
    let mut c310_hi = CheckResult::new("F_n <= 1");
    let mut c3141_lo = CheckResult::new("1 <= sum Ft_i");
    let mut c3141_id = CheckResult::new("dual trace identity");
    let mut c3141_mid = CheckResult::new("sum Ft_i <= k_n/F");
    let mut c3141_hi = CheckResult::new("sum Ft_i <= n");
    let mut c315_lo = CheckResult::new("F/k_n <= sum F_i");
    let mut c315_n = CheckResult::new("1/n <= F/k_n");
    let mut convex = CheckResult::new("convexity of F");
    let mut concave = CheckResult::new("concavity of Ft");

    let ones = vec![1.0; n];
    normalization.record(1e-12 - (f.eval(&ones).unwrap_or(f64::NAN) - 1.0).abs(), 0.0);

    let mut grad = vec![0.0; n];
    let mut grad_dual = vec![0.0; n];
    for _ in 0..samples {
        let k = sample_kappa(rng, n);
        let kn = k[n - 1];
        let fv = f.eval_grad_into(&k, &mut grad).expect("sample inside Γ₊");

        let mut perm = k.clone();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        symmetry.record(1e-12 * fv - (f.eval(&perm).unwrap() - fv).abs(), 0.0);
        for lambda in [0.5, 2.0, 7.0] {
            let scaled: Vec<f64> = k.iter().map(|x| lambda * x).collect();
            let rel = (f.eval(&scaled).unwrap() - lambda * fv).abs() / (lambda * fv);
            homogeneity.record(1e-10 - rel, 0.0);
        }
        monotone.record(grad.iter().copied().fold(f64::INFINITY, f64::min), 0.0);

        let h: f64 = k.iter().sum();
        let sum_fi: f64 = grad.iter().sum();
        let euler: f64 = grad.iter().zip(&k).map(|(g, x)| g * x).sum();
        let fn_last = grad[n - 1];
        c32_lo.record(fv - h / nf, tol);
        c32_hi.record(kn - fv, tol);
        c33.record(1.0 - sum_fi, tol);
        c36.record(
            grad.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
            tol,
        );
        c39_lo.record(fv - kn / nf, tol);
        c39_euler.record(1e-10 - (euler - fv).abs() / fv, 0.0);
        c39_hi.record(nf * fn_last * kn - fv, tol);
        c310_lo.record(fn_last - 1.0 / (nf * nf), tol);
        c310_hi.record(1.0 - fn_last, tol);

        let inv: Vec<f64> = k.iter().map(|x| 1.0 / x).collect();
        dual.eval_grad_into(&inv, &mut grad_dual).unwrap();
        let sum_dual: f64 = grad_dual.iter().sum();
        let weighted: f64 = grad.iter().zip(&k).map(|(g, x)| g * x * x).sum::<f64>() / (fv * fv);
        c3141_lo.record(sum_dual - 1.0, tol);
        c3141_id.record(1e-10 * sum_dual - (sum_dual - weighted).abs(), 0.0);
        c3141_mid.record(kn / fv - sum_dual, tol);
        c3141_hi.record(nf - sum_dual, tol);
        c315_lo.record(sum_fi - fv / kn, tol);
        c315_n.record(fv / kn - 1.0 / nf, tol);
    }

    for _ in 0..100 {
        let a = sample_kappa(rng, n);
        let b = sample_kappa(rng, n);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let avg = 0.5 * (f.eval(&a).unwrap() + f.eval(&b).unwrap());
        convex.record(avg - f.eval(&mid).unwrap(), tol);
        let avg_dual = 0.5 * (dual.eval(&a).unwrap() + dual.eval(&b).unwrap());
        concave.record(dual.eval(&mid).unwrap() - avg_dual, tol);
    }

    PropertyReport {
        label: f.label().to_string(),
        n,
        samples,
        tolerance: tol,
        checks: vec![
            symmetry, homogeneity, normalization, monotone, c32_lo, c32_hi, c33, c36, c39_lo,
            c39_euler, c39_hi, c310_lo, c310_hi, c3141_lo, c3141_id, c3141_mid, c3141_hi,
            c315_lo, c315_n, convex, concave,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm(p: f64, n: usize) -> CurvatureFunction {
        CurvatureFunction::power_mean(p, n).unwrap()
    }

    #[test]
    fn arithmetic_mean_value() {
        assert_eq!(pm(1.0, 2).eval(&[1.0, 3.0]).unwrap(), 2.0);
        assert_eq!(pm(1.0, 2).classification(), Classification::Linear);
    }

    #[test]
    fn quadratic_mean_value() {
        let v = pm(2.0, 2).eval(&[3.0, 4.0]).unwrap();
        assert!((v - 3.535_533_905_932_737_6).abs() < 1e-14);
        assert_eq!(pm(2.0, 2).classification(), Classification::Convex);
    }

    #[test]
    fn umbilic_values_are_the_common_curvature() {
        for p in [1.0, 2.0, 4.0, 8.0, 3.5] {
            for n in [2, 3, 5] {
                let v = pm(p, n).eval(&vec![2.75; n]).unwrap();
                assert!((v - 2.75).abs() < 1e-14);
                let d = pm(p, n).dual().eval(&vec![2.75; n]).unwrap();
                assert!((d - 2.75).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_small_exponent_and_dimension() {
        assert_eq!(
            CurvatureFunction::power_mean(0.5, 2),
            Err(CurvatureError::NonConvexExponent(0.5))
        );
        assert!(CurvatureFunction::power_mean(f64::NAN, 2).is_err());
        assert_eq!(
            CurvatureFunction::power_mean(2.0, 1),
            Err(CurvatureError::SmallDimension(1))
        );
    }

    #[test]
    fn dual_of_arithmetic_mean() {
        let d = pm(1.0, 2).dual();
        assert!((d.eval(&[1.0, 3.0]).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(d.eval(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(d.classification(), Classification::Concave);
        assert_eq!(d.label(), "dual(pm:1)");
    }

    #[test]
    fn double_dual_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [1.0, 2.0, 4.0, 8.0] {
            let f = pm(p, 3);
            let dd = f.dual().dual();
            assert_eq!(dd.classification(), f.classification());
            for _ in 0..100 {
                let k = sample_kappa(&mut rng, 3);
                let (a, b) = (f.eval(&k).unwrap(), dd.eval(&k).unwrap());
                assert!((a - b).abs() / a <= 1e-12);
            }
        }
    }

    #[test]
    fn linear_gradient_is_constant() {
        let g = pm(1.0, 4).grad(&[0.2, 1.0, 3.0, 9.0]).unwrap();
        assert!(g.iter().all(|&x| (x - 0.25).abs() < 1e-16));
    }

    #[test]
    fn euler_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fs = [pm(1.0, 3), pm(2.0, 3), pm(8.0, 3), pm(4.0, 3).dual()];
        for f in &fs {
            for _ in 0..1000 {
                let k = sample_kappa(&mut rng, 3);
                let v = f.eval(&k).unwrap();
                let g = f.grad(&k).unwrap();
                let e: f64 = g.iter().zip(&k).map(|(a, b)| a * b).sum();
                assert!((e - v).abs() / v <= 1e-10, "{} at {k:?}", f.label());
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let fs = [pm(2.0, 3), pm(4.0, 3), pm(8.0, 3), pm(2.0, 3).dual(), CurvatureFunction::geometric_mean(3).unwrap()];
        let h = 1e-6;
        for f in &fs {
            for _ in 0..200 {
                let k = sample_kappa(&mut rng, 3);
                let g = f.grad(&k).unwrap();
                let scale = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                for i in 0..3 {
                    let mut kp = k.clone();
                    let mut km = k.clone();
                    kp[i] += h;
                    km[i] -= h;
                    let fd = (f.eval(&kp).unwrap() - f.eval(&km).unwrap()) / (2.0 * h);
                    assert!((fd - g[i]).abs() / scale <= 1e-6, "{} d{i}: {fd} vs {}", f.label(), g[i]);
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        let f = pm(2.0, 2);
        assert!(matches!(f.grad(&[0.0, 1.0]), Err(CurvatureError::OutsideCone { .. })));
        assert!(matches!(f.eval(&[-1.0, 1.0]), Err(CurvatureError::OutsideCone { .. })));
        assert!(matches!(f.eval(&[f64::NAN, 1.0]), Err(CurvatureError::OutsideCone { .. })));
        assert_eq!(
            f.eval(&[1.0, 1.0, 1.0]),
            Err(CurvatureError::Dimension { expected: 2, got: 3 })
        );
    }

    #[test]
    fn axial_matches_full_gradient() {
        for f in [pm(4.0, 3), pm(2.0, 5).dual()] {
            let n = f.n();
            let mut k = vec![0.7; n];
            k[0] = 1.9;
            let g = f.grad(&k).unwrap();
            let a = f.eval_axial(1.9, 0.7).unwrap();
            assert!((a.value - f.eval(&k).unwrap()).abs() < 1e-15);
            assert!((a.d_mer - g[0]).abs() < 1e-14);
            assert!((a.d_rot - g[1]).abs() < 1e-14);
            assert!((a.d_rot - g[n - 1]).abs() < 1e-14);
        }
    }

    #[test]
    fn parse_names() {
        for (s, label) in [("pm:1", "pm:1"), ("pm:2", "pm:2"), ("pm:4", "pm:4"), ("pm:8", "pm:8"), ("geo", "geo")] {
            assert_eq!(CurvatureFunction::parse(s, 3).unwrap().label(), label);
        }
        for bad in ["pm:3", "pm:", "pm:-1", "harmonic", "", "pm:1.0"] {
            assert!(CurvatureFunction::parse(bad, 3).is_err(), "{bad}");
        }
    }

    #[test]
    fn suite_passes_for_quadratic_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let report = property_suite(&pm(2.0, 3), 10_000, &mut rng);
        assert!(report.passed(), "{}", report.to_table());
        for c in &report.checks {
            assert!(c.worst_margin >= -1e-10, "{}", c.name);
        }
    }

    #[test]
    fn unit_point_fn_bound() {
        let g = pm(1.0, 4).grad(&[1.0; 4]).unwrap();
        let fn_last = g[3];
        assert_eq!(fn_last, 0.25);
        assert!(1.0 / 16.0 <= fn_last && fn_last <= 1.0);
    }

    #[test]
    fn geometric_mean_violates_gradient_sum_bound() {
        let geo = CurvatureFunction::geometric_mean(2).unwrap();
        let g = geo.grad(&[0.25, 1.0]).unwrap();
        assert!((g.iter().sum::<f64>() - 1.25).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let report = property_suite(&geo, 2_000, &mut rng);
        let c33 = report.check("sum F_i <= 1").unwrap();
        assert!(c33.violations > 0);
        assert!(!report.passed());
    }
}
