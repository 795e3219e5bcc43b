//! Axially symmetric hypersurfaces of hyperbolic and de Sitter space.
//!
//! A surface is stored as a graph `u(θ)` over the latitude `θ ∈ [0, π]` of
//! `Sⁿ`. In de Sitter space `u` is the time coordinate `τ` and the embedding is
//! `x̃ = (sinh u, cosh u cos θ, cosh u sin θ e)`; in hyperbolic space `u` is the
//! geodesic distance from the Beltrami point and `x = (cosh u, sinh u cos θ,
//! sinh u sin θ e)`. The fixed unit vector `e` of `S^{n−1}` is the third
//! coordinate axis, so every meridian quantity lives in the 3-space spanned by
//! coordinates 0, 1 and 2.
//!
//! Second fundamental forms are read off the codimension-2 Gaussian formulas:
//! with a unit normal `ν`, `h = −⟨x_θθ, ν⟩` in both spaces. Orientation is
//! fixed by two anchors: the de Sitter normal is past directed and slices
//! `{τ = c < 0}` get `κ = −tanh c`; the hyperbolic normal is exterior and
//! geodesic spheres get `κ = coth r`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::rc::Rc;

use thiserror::Error;

use crate::curvature::{AxialValue, CurvatureError, CurvatureFunction};
use crate::minkowski::{LorentzVector, SpaceTag};
use crate::stencil::{self, Order, Parity};

/// Sectional curvature of de Sitter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientConstants {
    pub k_n: f64,
}

pub const DE_SITTER: AmbientConstants = AmbientConstants { k_n: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("not spacelike at grid index {index}")]
    NotSpacelike { index: usize },
    #[error("convexity lost at grid index {index}: κ_mer = {k_mer}, κ_rot = {k_rot}")]
    ConvexityLost { index: usize, k_mer: f64, k_rot: f64 },
    #[error("non-finite geometry at grid index {index}")]
    NonFinite { index: usize },
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
}

impl GeometryError {
    /// Grid index the error refers to, if any.
    pub fn index(&self) -> Option<usize> {
        match self {
            GeometryError::NotSpacelike { index }
            | GeometryError::ConvexityLost { index, .. }
            | GeometryError::NonFinite { index } => Some(*index),
            _ => None,
        }
    }
}

/// Vectors of the meridian 3-space `(x⁰, x¹, x²)`.
pub type V3 = [f64; 3];

#[inline]
pub fn dot3(a: &V3, b: &V3) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Minkowski-orthogonal complement direction of `a` and `b` in `R^{2,1}`.
#[inline]
pub fn lorentz_cross(a: &V3, b: &V3) -> V3 {
    [
        -(a[1] * b[2] - a[2] * b[1]),
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Lifts a meridian vector to `R^{n+1,1}`.
pub fn lift(v: &V3, n: usize) -> LorentzVector {
    let mut out = vec![0.0; n + 2];
    out[..3].copy_from_slice(v);
    LorentzVector::new(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeridianSurface {
    space: SpaceTag,
    n: usize,
    u: Vec<f64>,
}

impl MeridianSurface {
    /// Graph values `u` at `θ_k = kπ/K`, `k = 0 … K`.
    pub fn new(space: SpaceTag, n: usize, u: Vec<f64>) -> Result<Self, GeometryError> {
        if n < 2 {
            return Err(GeometryError::InvalidSurface(format!("dimension n = {n} < 2")));
        }
        if u.len() < 5 {
            return Err(GeometryError::InvalidSurface(format!(
                "need at least 4 grid intervals, got {}",
                u.len().saturating_sub(1)
            )));
        }
        if let Some(index) = u.iter().position(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        if space == SpaceTag::Hyperbolic {
            if let Some(index) = u.iter().position(|&x| x <= 0.0) {
                return Err(GeometryError::InvalidSurface(format!(
                    "radial graph must be positive (Beltrami point inside), u[{index}] = {}",
                    u[index]
                )));
            }
        }
        Ok(Self { space, n, u })
    }

    pub fn from_fn(space: SpaceTag, n: usize, k: usize, f: impl Fn(f64) -> f64) -> Result<Self, GeometryError> {
        let h = PI / k as f64;
        Self::new(space, n, (0..=k).map(|i| f(i as f64 * h)).collect())
    }

    /// `u ≡ c`: a coordinate slice in de Sitter space, a geodesic sphere in
    /// hyperbolic space.
    pub fn constant(space: SpaceTag, n: usize, k: usize, c: f64) -> Result<Self, GeometryError> {
        Self::new(space, n, vec![c; k + 1])
    }

    /// `u(θ) = c + a cos(mθ)`.
    pub fn perturbed(space: SpaceTag, n: usize, k: usize, c: f64, a: f64, m: u32) -> Result<Self, GeometryError> {
        let m = f64::from(m);
        Self::from_fn(space, n, k, |t| c + a * (m * t).cos())
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid intervals `K`.
    pub fn intervals(&self) -> usize {
        self.u.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        PI / self.intervals() as f64
    }

    pub fn theta(&self, k: usize) -> f64 {
        // exact end points
        if k == self.intervals() {
            PI
        } else {
            k as f64 * self.spacing()
        }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn with_u(&self, u: Vec<f64>) -> Result<Self, GeometryError> {
        Self::new(self.space, self.n, u)
    }

    /// Ambient position of grid point `k`.
    pub fn embed(&self, k: usize) -> LorentzVector {
        lift(&embed3(self.space, self.u[k], self.theta(k)), self.n)
    }

    /// Sup-distance between the graphs of two surfaces on the same grid.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.u.len(), other.u.len(), "grids differ");
        self.u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn embed3(space: SpaceTag, u: f64, theta: f64) -> V3 {
    let (s, c) = (u.sinh(), u.cosh());
    let (st, ct) = theta.sin_cos();
    match space {
        SpaceTag::DeSitter => [s, c * ct, c * st],
        SpaceTag::Hyperbolic => [c, s * ct, s * st],
    }
}

/// First and second `θ`-derivatives of the embedding from `u`, `u'`, `u''`.
pub fn embedding_jet(space: SpaceTag, u: f64, p: f64, pp: f64, theta: f64) -> (V3, V3, V3) {
    let (st, ct) = theta.sin_cos();
    jet_with_trig(space, cosh_sinh(u), p, pp, st, ct)
}

fn cosh_sinh(u: f64) -> (f64, f64) {
    if u.abs() < 0.5 {
        (u.cosh(), u.sinh())
    } else {
        let e = u.exp();
        let r = 1.0 / e;
        (0.5 * (e + r), 0.5 * (e - r))
    }
}

#[inline(always)]
fn jet_with_trig(space: SpaceTag, (c, s): (f64, f64), p: f64, pp: f64, st: f64, ct: f64) -> (V3, V3, V3) {
    // (a, b) = (cosh, sinh) in de Sitter, (sinh, cosh) in hyperbolic space
    let (a, b) = match space {
        SpaceTag::DeSitter => (c, s),
        SpaceTag::Hyperbolic => (s, c),
    };
    let x = [b, a * ct, a * st];
    let xd = [a * p, b * p * ct - a * st, b * p * st + a * ct];
    let radial = a * p * p + b * pp - a;
    let xdd = [b * p * p + a * pp, radial * ct - 2.0 * b * p * st, radial * st + 2.0 * b * p * ct];
    (x, xd, xdd)
}

thread_local! {
    static GRID_TRIG: RefCell<Vec<(usize, Rc<[(f64, f64)]>)>> = const { RefCell::new(Vec::new()) };
}

/// `(sin θ_k, cos θ_k)` on the uniform grid, cached per thread.
fn grid_trig(surface: &MeridianSurface) -> Rc<[(f64, f64)]> {
    grid_trig_k(surface.intervals())
}

fn grid_trig_k(k: usize) -> Rc<[(f64, f64)]> {
    GRID_TRIG.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some((_, t)) = cache.iter().find(|(kk, _)| *kk == k) {
            return t.clone();
        }
        let t: Rc<[(f64, f64)]> = (0..=k)
            .map(|i| if i == k { PI } else { i as f64 * PI / k as f64 }.sin_cos())
            .collect();
        if cache.len() >= 8 {
            cache.remove(0);
        }
        cache.push((k, t.clone()));
        t
    })
}

/// Per-point geometric state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    pub n: usize,
    pub space: SpaceTag,
    pub theta: f64,
    pub u: f64,
    /// Embedding in the meridian 3-space.
    pub x: V3,
    /// Tangent along the meridian parameter.
    pub x_d: V3,
    pub nu: V3,
    pub g_mer: f64,
    pub g_rot: f64,
    pub h_mer: f64,
    pub h_rot: f64,
    pub k_mer: f64,
    pub k_rot: f64,
    /// Gradient factor `v ≤ 1`: `v² = 1 − cosh⁻²u |Du|²` in de Sitter
    /// space, `v⁻² = 1 + sinh⁻²u |Du|²` in hyperbolic space.
    pub v: f64,
    /// `ṽ = 1/v`
    pub vt: f64,
    /// `ṽ cosh u`.
    pub chi: f64,
    /// `F` and its axial derivatives; NaN when computed by [`compute_shape`].
    pub f: AxialValue,
    /// `H̃ = Σ κ_i⁻¹`.
    pub h_tilde: f64,
}

impl PointGeometry {
    pub fn embedding(&self) -> LorentzVector {
        lift(&self.x, self.n)
    }

    pub fn normal(&self) -> LorentzVector {
        lift(&self.nu, self.n)
    }

    pub fn kappa_min(&self) -> f64 {
        self.k_mer.min(self.k_rot)
    }

    pub fn kappa_max(&self) -> f64 {
        self.k_mer.max(self.k_rot)
    }

    /// Principal curvatures sorted ascending.
    pub fn kappa_sorted(&self) -> Vec<f64> {
        self.sorted_pairs().into_iter().map(|(k, _)| k).collect()
    }

    /// `F_i` listed in the order of [`Self::kappa_sorted`].
    pub fn f_i_sorted(&self) -> Vec<f64> {
        self.sorted_pairs().into_iter().map(|(_, g)| g).collect()
    }

    fn sorted_pairs(&self) -> Vec<(f64, f64)> {
        let mut pairs = vec![(self.k_rot, self.f.d_rot); self.n];
        pairs[0] = (self.k_mer, self.f.d_mer);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    }

    /// `Σ F_i`.
    pub fn f_trace(&self) -> f64 {
        self.f.d_mer + (self.n - 1) as f64 * self.f.d_rot
    }

    /// `Σ F_i κ_i²`, i.e. `F^{ij} h_ik h^k_j` in an orthonormal frame.
    pub fn f_weighted_curvature_square(&self) -> f64 {
        self.f.d_mer * self.k_mer * self.k_mer + (self.n - 1) as f64 * self.f.d_rot * self.k_rot * self.k_rot
    }

    /// χ from the normal's components, independent of the graph gradient.
    pub fn chi_from_normal(&self) -> f64 {
        let frame = slice_normal(self.space, &self.x);
        tilde_v(self.space, dot3(&self.nu, &frame)) * cosh_u(self.space, &self.x)
    }
}

/// `ṽ ≥ 1` from the pairing of the surface normal with the slice or sphere
/// normal: the pairing is `ṽ` itself in de Sitter space and `1/ṽ` in
/// hyperbolic space.
fn tilde_v(space: SpaceTag, pairing: f64) -> f64 {
    match space {
        SpaceTag::DeSitter => pairing,
        SpaceTag::Hyperbolic => 1.0 / pairing,
    }
}

fn cosh_u(space: SpaceTag, x: &V3) -> f64 {
    match space {
        SpaceTag::DeSitter => (1.0 + x[0] * x[0]).sqrt(),
        SpaceTag::Hyperbolic => x[0],
    }
}

/// Unit normal of the coordinate slice (de Sitter) or geodesic sphere
/// (hyperbolic) through `x`, oriented so that its pairing with the surface
/// normal is positive on slices and spheres.
fn slice_normal(space: SpaceTag, x: &V3) -> V3 {
    match space {
        SpaceTag::DeSitter => {
            // future unit normal E_τ = (cosh u, sinh u r̂)
            let c = (1.0 + x[0] * x[0]).sqrt();
            [c, x[0] * x[1] / c, x[0] * x[2] / c]
        }
        SpaceTag::Hyperbolic => {
            // radial unit vector E_r = (sinh u, cosh u r̂)
            let s = (x[0] * x[0] - 1.0).max(0.0).sqrt();
            [s, x[0] * x[1] / s, x[0] * x[2] / s]
        }
    }
}

/// Geometry at one point of a meridian curve from its ambient 2-jet.
///
/// `x_d`, `x_dd` are derivatives along any regular meridian parameter; the
/// principal curvatures do not depend on that choice. `pole` marks points on
/// the symmetry axis where the rotational curvature is the meridian limit.
pub fn ambient_point(
    space: SpaceTag,
    n: usize,
    index: usize,
    x: V3,
    x_d: V3,
    x_dd: V3,
    pole: bool,
    f: Option<&CurvatureFunction>,
) -> Result<PointGeometry, GeometryError> {
    let u = match space {
        SpaceTag::DeSitter => x[0].asinh(),
        SpaceTag::Hyperbolic => x[0].max(1.0).acosh(),
    };
    let theta = x[2].atan2(x[1]);
    point_from_jet(space, n, index, theta, u, x, x_d, x_dd, pole, f)
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn point_from_jet(
    space: SpaceTag,
    n: usize,
    index: usize,
    theta: f64,
    u: f64,
    x: V3,
    x_d: V3,
    x_dd: V3,
    pole: bool,
    f: Option<&CurvatureFunction>,
) -> Result<PointGeometry, GeometryError> {
    let g_mer = dot3(&x_d, &x_d);
    if !(g_mer > 0.0) {
        return if g_mer.is_nan() {
            Err(GeometryError::NonFinite { index })
        } else {
            Err(GeometryError::NotSpacelike { index })
        };
    }
    let mut nu = lorentz_cross(&x, &x_d);
    let q = dot3(&nu, &nu);
    let causal_ok = match space {
        SpaceTag::DeSitter => q < 0.0,
        SpaceTag::Hyperbolic => q > 0.0,
    };
    if !causal_ok {
        return Err(GeometryError::NotSpacelike { index });
    }
    let scale = 1.0 / q.abs().sqrt();
    nu.iter_mut().for_each(|c| *c *= scale);
    let frame = slice_normal(space, &x);
    let flip = match space {
        SpaceTag::DeSitter => nu[0] > 0.0,
        SpaceTag::Hyperbolic => dot3(&nu, &frame) < 0.0,
    };
    if flip {
        nu.iter_mut().for_each(|c| *c = -*c);
    }

    let h_mer = -dot3(&x_dd, &nu);
    let k_mer = h_mer / g_mer;
    let rho = x[2];
    let (g_rot, h_rot, k_rot) = if pole {
        (0.0, 0.0, k_mer)
    } else {
        (rho * rho, rho * nu[2], nu[2] / rho)
    };
    if !(k_mer.is_finite() && k_rot.is_finite()) {
        return Err(GeometryError::NonFinite { index });
    }
    if !(k_mer > 0.0 && k_rot > 0.0) {
        return Err(GeometryError::ConvexityLost { index, k_mer, k_rot });
    }

    let vt = tilde_v(space, dot3(&nu, &frame));
    let cu = cosh_u(space, &x);
    let fv = match f {
        Some(f) => f.eval_axial(k_mer, k_rot)?,
        None => AxialValue {
            value: f64::NAN,
            d_mer: f64::NAN,
            d_rot: f64::NAN,
        },
    };
    Ok(PointGeometry {
        n,
        space,
        theta,
        u,
        x,
        x_d,
        nu,
        g_mer,
        g_rot,
        h_mer,
        h_rot,
        k_mer,
        k_rot,
        v: 1.0 / vt,
        vt,
        chi: vt * cu,
        f: fv,
        h_tilde: 1.0 / k_mer + (n - 1) as f64 / k_rot,
    })
}

/// Geometry of a graph point from `u`, `u'`, `u''` at latitude `θ`.
#[allow(clippy::too_many_arguments)]
pub fn graph_point(
    space: SpaceTag,
    n: usize,
    index: usize,
    theta: f64,
    u: f64,
    p: f64,
    pp: f64,
    pole: bool,
    f: Option<&CurvatureFunction>,
) -> Result<PointGeometry, GeometryError> {
    let (st, ct) = theta.sin_cos();
    graph_point_trig(space, n, index, theta, (st, ct), u, p, pp, pole, f)
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn graph_point_trig(
    space: SpaceTag,
    n: usize,
    index: usize,
    theta: f64,
    (st, ct): (f64, f64),
    u: f64,
    p: f64,
    pp: f64,
    pole: bool,
    f: Option<&CurvatureFunction>,
) -> Result<PointGeometry, GeometryError> {
    let cs = cosh_sinh(u);
    let v2 = match space {
        SpaceTag::DeSitter => 1.0 - p * p / (cs.0 * cs.0),
        SpaceTag::Hyperbolic => 1.0,
    };
    if !(v2 > 0.0) {
        return Err(GeometryError::NotSpacelike { index });
    }
    let (x, xd, xdd) = jet_with_trig(space, cs, p, pp, st, ct);
    let mut pg = point_from_jet(space, n, index, theta, u, x, xd, xdd, pole, f)?;
    if space == SpaceTag::DeSitter {
        pg.v = v2.sqrt();
    }
    Ok(pg)
}

/// Principal curvatures and graph speed factor of a graph point, from the
/// closed forms of the reduced graph equations. The speed factor is `v` in
/// de Sitter space and `ṽ` in hyperbolic space, the factors in `u_t = v/F`
/// and `u_t = −ṽF̃`. Agrees with [`graph_point`] to rounding.
///
/// Returns `(κ_mer, κ_rot, v)` with `v` the de Sitter factor or `v_H` in `H`.
#[allow(clippy::too_many_arguments)]
#[inline(always)]
pub fn graph_curvatures(
    space: SpaceTag,
    index: usize,
    (st, ct): (f64, f64),
    u: f64,
    p: f64,
    pp: f64,
    pole: bool,
) -> Result<(f64, f64, f64), GeometryError> {
    let (c, s) = cosh_sinh(u);
    let cot = if pole { 0.0 } else { ct / st };
    let (k_mer, k_rot, v) = match space {
        SpaceTag::DeSitter => {
            let c2 = c * c;
            let d = c2 - p * p;
            if !(d > 0.0) {
                return Err(GeometryError::NotSpacelike { index });
            }
            let v = d.sqrt() / c;
            let vt = 1.0 / v;
            let k_mer = -vt * (pp + c * s - 2.0 * s * p * p / c) / d;
            let k_rot = -vt * (c * s + p * cot) / c2;
            (k_mer, k_rot, v)
        }
        SpaceTag::Hyperbolic => {
            let s2 = s * s;
            let w = (1.0 + p * p / s2).sqrt();
            let k_mer = (s * c - pp + 2.0 * c * p * p / s) / ((s2 + p * p) * w);
            let k_rot = (s * c - p * cot) / (s2 * w);
            (k_mer, k_rot, w)
        }
    };
    let k_rot = if pole { k_mer } else { k_rot };
    if !(k_mer.is_finite() && k_rot.is_finite() && v.is_finite()) {
        return Err(GeometryError::NonFinite { index });
    }
    if !(k_mer > 0.0 && k_rot > 0.0) {
        return Err(GeometryError::ConvexityLost { index, k_mer, k_rot });
    }
    Ok((k_mer, k_rot, v))
}

/// `(κ_mer, κ_rot, speed factor)` at every grid point; see [`graph_curvatures`].
pub fn curvatures_into(
    space: SpaceTag,
    u: &[f64],
    d1: &mut [f64],
    d2: &mut [f64],
    out: &mut Vec<(f64, f64, f64)>,
) -> Result<(), GeometryError> {
    let last = u.len() - 1;
    let h = PI / last as f64;
    stencil::derivatives_into(u, h, Parity::Even, Parity::Even, Order::Fourth, d1, d2);
    let trig = grid_trig_k(last);
    out.clear();
    for k in 0..=last {
        out.push(graph_curvatures(space, k, trig[k], u[k], d1[k], d2[k], k == 0 || k == last)?);
    }
    Ok(())
}

/// Fourth-order `u'`, `u''` with even reflection at both poles.
pub fn graph_derivatives(surface: &MeridianSurface) -> (Vec<f64>, Vec<f64>) {
    stencil::derivatives(surface.u(), surface.spacing(), Parity::Even, Parity::Even, Order::Fourth)
}

/// Full geometric state at every grid point.
pub fn compute_geometry(surface: &MeridianSurface, f: &CurvatureFunction) -> Result<Vec<PointGeometry>, GeometryError> {
    geometry_with(surface, Some(f))
}

/// Shape only: as [`compute_geometry`] but with `f` left as NaN.
pub fn compute_shape(surface: &MeridianSurface) -> Result<Vec<PointGeometry>, GeometryError> {
    geometry_with(surface, None)
}

fn geometry_with(surface: &MeridianSurface, f: Option<&CurvatureFunction>) -> Result<Vec<PointGeometry>, GeometryError> {
    if let Some(f) = f.filter(|f| f.n() != surface.n()) {
        return Err(GeometryError::InvalidSurface(format!(
            "curvature function has n = {}, surface has n = {}",
            f.n(),
            surface.n()
        )));
    }
    let (d1, d2) = graph_derivatives(surface);
    let last = surface.intervals();
    let trig = grid_trig(surface);
    let mut out = Vec::with_capacity(last + 1);
    for k in 0..=last {
        out.push(
            graph_point_trig(
                surface.space(),
                surface.n(),
                k,
                surface.theta(k),
                trig[k],
                surface.u()[k],
                d1[k],
                d2[k],
                k == 0 || k == last,
                f,
            )?,
        );
    }
    Ok(out)
}

/// One row of flow diagnostics; the CSV column order is the field order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub dt: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub osc_u: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub pinch_ratio: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub vt_max: f64,
    pub chi_min: f64,
    pub chi_max: f64,
    /// `sup(log F + log H̃) − 2nt`
    pub w_pinch: f64,
    /// `sup(log F + log χ)`
    pub w_f_chi: f64,
}

impl DiagnosticsRow {
    pub const COLUMNS: [&'static str; 15] = [
        "t", "dt", "min_u", "max_u", "osc_u", "kappa_min", "kappa_max", "pinch_ratio", "F_min", "F_max",
        "vtilde_max", "chi_min", "chi_max", "w_pinch", "w_Fchi",
    ];

    pub fn values(&self) -> [f64; 15] {
        [
            self.t,
            self.dt,
            self.min_u,
            self.max_u,
            self.osc_u,
            self.kappa_min,
            self.kappa_max,
            self.pinch_ratio,
            self.f_min,
            self.f_max,
            self.vt_max,
            self.chi_min,
            self.chi_max,
            self.w_pinch,
            self.w_f_chi,
        ]
    }
}

/// Extrema over the grid.
pub fn diagnostics(pg: &[PointGeometry], t: f64, dt: f64, n: usize) -> DiagnosticsRow {
    let mut row = DiagnosticsRow {
        t,
        dt,
        min_u: f64::INFINITY,
        max_u: f64::NEG_INFINITY,
        osc_u: 0.0,
        kappa_min: f64::INFINITY,
        kappa_max: f64::NEG_INFINITY,
        pinch_ratio: 1.0,
        f_min: f64::INFINITY,
        f_max: f64::NEG_INFINITY,
        vt_max: f64::NEG_INFINITY,
        chi_min: f64::INFINITY,
        chi_max: f64::NEG_INFINITY,
        w_pinch: f64::NEG_INFINITY,
        w_f_chi: f64::NEG_INFINITY,
    };
    for p in pg {
        let (lo, hi) = (p.kappa_min(), p.kappa_max());
        row.min_u = row.min_u.min(p.u);
        row.max_u = row.max_u.max(p.u);
        row.kappa_min = row.kappa_min.min(lo);
        row.kappa_max = row.kappa_max.max(hi);
        row.pinch_ratio = row.pinch_ratio.max(hi / lo);
        row.f_min = row.f_min.min(p.f.value);
        row.f_max = row.f_max.max(p.f.value);
        row.vt_max = row.vt_max.max(p.vt);
        row.chi_min = row.chi_min.min(p.chi);
        row.chi_max = row.chi_max.max(p.chi);
        row.w_pinch = row.w_pinch.max(p.f.value.ln() + p.h_tilde.ln());
        row.w_f_chi = row.w_f_chi.max(p.f.value.ln() + p.chi.ln());
    }
    row.osc_u = row.max_u - row.min_u;
    row.w_pinch -= 2.0 * n as f64 * t;
    row
}
