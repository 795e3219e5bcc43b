//! Linear algebra of Minkowski space `R^{n+1,1}` with signature `(-,+,...,+)`.
//!
//! Hyperbolic space is the upper sheet `q(x) = -1, x^0 > 0` and de Sitter
//! space is the one-sheeted quadric `q(x) = +1`. Index 0 is always the time
//! coordinate.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use thiserror::Error;

/// Tolerance for quadric membership after projection.
pub const QUADRIC_TOL: f64 = 1e-10;

/// Tolerance on `L^T η L − η` for constructed transforms.
pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinkowskiError {
    #[error("point is not on {space}: q(x) = {q}, x^0 = {x0}")]
    NotOnQuadric { space: SpaceTag, q: f64, x0: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vector is null or has the wrong causal character (q = {q})")]
    Degenerate { q: f64 },
}

/// The two quadrics living in Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    Hyperbolic,
    DeSitter,
}

impl SpaceTag {
    /// Value of `q` on the quadric.
    pub fn quadric_value(self) -> f64 {
        match self {
            SpaceTag::Hyperbolic => -1.0,
            SpaceTag::DeSitter => 1.0,
        }
    }

    pub fn contains(self, x: &LorentzVector) -> bool {
        let q = x.q();
        match self {
            SpaceTag::Hyperbolic => (q + 1.0).abs() <= QUADRIC_TOL && x[0] > 0.0,
            SpaceTag::DeSitter => (q - 1.0).abs() <= QUADRIC_TOL,
        }
    }

    pub fn check(self, x: &LorentzVector) -> Result<(), MinkowskiError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(MinkowskiError::NotOnQuadric {
                space: self,
                q: x.q(),
                x0: x[0],
            })
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Hyperbolic => f.write_str("hyperbolic space"),
            SpaceTag::DeSitter => f.write_str("de Sitter space"),
        }
    }
}

/// A vector in `R^{n+1,1}`; component 0 is the time coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzVector(Vec<f64>);

impl LorentzVector {
    pub fn new(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// Unit vector along axis `a`.
    pub fn basis(dim: usize, a: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[a] = 1.0;
        v
    }

    /// Number of components, `n + 2`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Lorentz inner product `⟨x, y⟩ = −x⁰y⁰ + Σ_{a≥1} x^a y^a`.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let spatial: f64 = self.0[1..]
            .iter()
            .zip(&other.0[1..])
            .map(|(a, b)| a * b)
            .sum();
        spatial - self.0[0] * other.0[0]
    }

    /// The quadratic form `q(x) = ⟨x, x⟩`.
    pub fn q(&self) -> f64 {
        self.dot(self)
    }

    /// Radial re-projection onto the quadric `q = sign(q(x))`.
    pub fn project(&self) -> Result<Self, MinkowskiError> {
        let q = self.q();
        if q == 0.0 || !q.is_finite() {
            return Err(MinkowskiError::Degenerate { q });
        }
        let s = q.abs().sqrt();
        Ok(Self(self.0.iter().map(|c| c / s).collect()))
    }

    /// Projects onto the given space, checking the causal character first.
    pub fn project_onto(&self, space: SpaceTag) -> Result<Self, MinkowskiError> {
        let q = self.q();
        let ok = match space {
            SpaceTag::Hyperbolic => q < 0.0 && self.0[0] > 0.0,
            SpaceTag::DeSitter => q > 0.0,
        };
        if !ok {
            return Err(MinkowskiError::Degenerate { q });
        }
        self.project()
    }

    /// Euclidean sup-norm, used for residuals.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for LorentzVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for LorentzVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &LorentzVector {
    type Output = LorentzVector;
    fn add(self, rhs: Self) -> LorentzVector {
        LorentzVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LorentzVector {
    type Output = LorentzVector;
    fn sub(self, rhs: Self) -> LorentzVector {
        LorentzVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &LorentzVector {
    type Output = LorentzVector;
    fn mul(self, s: f64) -> LorentzVector {
        LorentzVector(self.0.iter().map(|a| a * s).collect())
    }
}

impl Neg for &LorentzVector {
    type Output = LorentzVector;
    fn neg(self) -> LorentzVector {
        LorentzVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Whether a transform preserves the time orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Orthochronous,
    TimeFlip,
}

/// An element of `O(n+1,1)` stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzTransform {
    dim: usize,
    matrix: Vec<f64>,
}

impl LorentzTransform {
    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for a in 0..dim {
            matrix[a * dim + a] = 1.0;
        }
        Self { dim, matrix }
    }

    /// Hyperbolic rotation by rapidity `theta` in the `(x⁰, x¹)` plane.
    pub fn boost(dim: usize, theta: f64) -> Self {
        let mut l = Self::identity(dim);
        let (s, c) = (theta.sinh(), theta.cosh());
        l.set(0, 0, c);
        l.set(0, 1, s);
        l.set(1, 0, s);
        l.set(1, 1, c);
        l
    }

    /// Givens rotation by `angle` in the spatial `(x^a, x^b)` plane,
    /// `1 ≤ a, b`.
    pub fn givens(dim: usize, a: usize, b: usize, angle: f64) -> Self {
        assert!(a >= 1 && b >= 1 && a != b && a < dim && b < dim);
        let mut l = Self::identity(dim);
        let (s, c) = angle.sin_cos();
        l.set(a, a, c);
        l.set(a, b, -s);
        l.set(b, a, s);
        l.set(b, b, c);
        l
    }

    /// Negates the time coordinate; maps `N₊ = {τ > 0}` onto `N₋`.
    pub fn time_flip(dim: usize) -> Self {
        let mut l = Self::identity(dim);
        l.set(0, 0, -1.0);
        l
    }

    /// Isometry taking `p ∈ H` to the Beltrami point `(1, 0, …, 0)`: a chain of
    /// Givens rotations collecting the spatial part onto `x¹`, then one boost.
    pub fn normalize_to_beltrami(p: &LorentzVector) -> Result<Self, MinkowskiError> {
        SpaceTag::Hyperbolic.check(p)?;
        let dim = p.dim();
        let mut l = Self::identity(dim);
        let mut w = p.clone();
        for b in (2..dim).rev() {
            let (xa, xb) = (w[1], w[b]);
            if xb == 0.0 {
                continue;
            }
            // rotate (x¹, x^b) so that x^b vanishes
            let g = Self::givens(dim, 1, b, -xb.atan2(xa));
            w = g.apply(&w);
            l = g.compose(&l);
        }
        let rapidity = w[1].asinh();
        let boost = Self::boost(dim, -rapidity);
        Ok(boost.compose(&l))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.matrix[row * self.dim + col] = value;
    }

    pub fn orientation(&self) -> Orientation {
        if self.get(0, 0) > 0.0 {
            Orientation::Orthochronous
        } else {
            Orientation::TimeFlip
        }
    }

    pub fn apply(&self, x: &LorentzVector) -> LorentzVector {
        assert_eq!(x.dim(), self.dim, "dimension mismatch");
        let out = (0..self.dim)
            .map(|r| {
                self.matrix[r * self.dim..(r + 1) * self.dim]
                    .iter()
                    .zip(x.components())
                    .map(|(m, c)| m * c)
                    .sum()
            })
            .collect();
        LorentzVector(out)
    }

    /// `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut matrix = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                matrix[r * d + c] = (0..d).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        Self { dim: d, matrix }
    }

    /// `max |LᵀηL − η|` entrywise.
    pub fn isometry_residual(&self) -> f64 {
        let d = self.dim;
        let eta = |a: usize| if a == 0 { -1.0 } else { 1.0 };
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let s: f64 = (0..d).map(|k| self.get(k, i) * eta(k) * self.get(k, j)).sum();
                let target = if i == j { eta(i) } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// The time-flip as a standalone operation on vectors.
pub fn time_flip(x: &LorentzVector) -> LorentzVector {
    let mut y = x.clone();
    y[0] = -y[0];
    y
}
