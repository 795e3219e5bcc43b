//! Gauss map duality between convex surfaces in `H` and spacelike convex
//! surfaces in de Sitter space.
//!
//! The dual of `M ⊂ H` is traced by its exterior unit normal, then time
//! flipped so that it lies in the past half `N₋` and carries past-directed
//! normals like every other de Sitter surface here. The inverse map is the
//! same construction run from `N₋` into `H`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{compute_shape, dot3, graph_point, GeometryError, MeridianSurface, PointGeometry, V3};
use crate::minkowski::SpaceTag;
use crate::spline::{EvenSpline, SplineError};
use crate::stencil::{self, Order, Parity};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualityError {
    #[error("expected a surface in {expected}, got one in {found}")]
    WrongSpace { expected: SpaceTag, found: SpaceTag },
    #[error("de Sitter surface leaves the past half at grid index {index}")]
    NotPast { index: usize },
    #[error("dual latitude is not monotone at grid index {index}")]
    NonGraphical { index: usize },
    #[error("surfaces have different grids ({0} vs {1} intervals)")]
    MismatchedGrids(usize, usize),
    #[error("surfaces have different dimensions ({0} vs {1})")]
    MismatchedDimension(usize, usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// Dual points of a meridian before resampling: `(θ̃_k, ũ_k)` in the target
/// space's chart, one per source grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarImage {
    pub space: SpaceTag,
    pub n: usize,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    /// Dual points as ambient vectors (reduced to the meridian 3-space).
    pub points: Vec<V3>,
}

impl PolarImage {
    fn spline(&self) -> Result<EvenSpline, SplineError> {
        EvenSpline::new(&self.theta, &self.u)
    }

    /// Graph over the uniform grid with `intervals` intervals.
    pub fn resample(&self, intervals: usize) -> Result<MeridianSurface, DualityError> {
        let s = self.spline()?;
        let u = (0..=intervals)
            .map(|j| s.value(grid_theta(j, intervals)))
            .collect();
        Ok(MeridianSurface::new(self.space, self.n, u)?)
    }

    /// Interpolation error of a spline through every other point, measured
    /// at the points left out. Overestimates the full-resolution error.
    pub fn resampling_error(&self) -> Result<f64, SplineError> {
        let last = self.theta.len() - 1;
        let keep: Vec<usize> = (0..=last).filter(|i| i % 2 == 0 || *i == last).collect();
        let xs: Vec<f64> = keep.iter().map(|&i| self.theta[i]).collect();
        let ys: Vec<f64> = keep.iter().map(|&i| self.u[i]).collect();
        let half = EvenSpline::new(&xs, &ys)?;
        Ok((1..last)
            .step_by(2)
            .map(|i| (half.value(self.theta[i]) - self.u[i]).abs())
            .fold(0.0, f64::max))
    }
}

fn grid_theta(j: usize, intervals: usize) -> f64 {
    if j == intervals {
        PI
    } else {
        j as f64 * PI / intervals as f64
    }
}

fn flip(v: &V3) -> V3 {
    [-v[0], v[1], v[2]]
}

fn polar_from(pg: &[PointGeometry], target: SpaceTag, n: usize) -> Result<PolarImage, DualityError> {
    let last = pg.len() - 1;
    let mut theta = Vec::with_capacity(pg.len());
    let mut u = Vec::with_capacity(pg.len());
    let mut points = Vec::with_capacity(pg.len());
    for (k, p) in pg.iter().enumerate() {
        let y = flip(&p.nu);
        let t = match k {
            0 => 0.0,
            _ if k == last => PI,
            _ => y[2].atan2(y[1]),
        };
        if k > 0 && !(t > theta[k - 1]) {
            return Err(DualityError::NonGraphical { index: k });
        }
        theta.push(t);
        u.push(match target {
            SpaceTag::DeSitter => y[0].asinh(),
            SpaceTag::Hyperbolic => y[0].max(1.0).acosh(),
        });
        points.push(y);
    }
    Ok(PolarImage {
        space: target,
        n,
        theta,
        u,
        points,
    })
}

fn expect_space(surface: &MeridianSurface, expected: SpaceTag) -> Result<(), DualityError> {
    if surface.space() == expected {
        Ok(())
    } else {
        Err(DualityError::WrongSpace {
            expected,
            found: surface.space(),
        })
    }
}

/// Time-flipped normal image of a convex surface in `H`.
pub fn gauss_image(m: &MeridianSurface) -> Result<PolarImage, DualityError> {
    expect_space(m, SpaceTag::Hyperbolic)?;
    let pg = compute_shape(m)?;
    polar_from(&pg, SpaceTag::DeSitter, m.n())
}

/// Inverse construction: time flip of the past normal of a surface in `N₋`.
pub fn inverse_gauss_image(mt: &MeridianSurface) -> Result<PolarImage, DualityError> {
    expect_space(mt, SpaceTag::DeSitter)?;
    if let Some(index) = mt.u().iter().position(|&u| !(u < 0.0)) {
        return Err(DualityError::NotPast { index });
    }
    let pg = compute_shape(mt)?;
    polar_from(&pg, SpaceTag::Hyperbolic, mt.n())
}

/// Dual surface in `N₋`, resampled onto the same uniform grid.
pub fn dualize(m: &MeridianSurface) -> Result<MeridianSurface, DualityError> {
    gauss_image(m)?.resample(m.intervals())
}

pub fn dualize_inverse(mt: &MeridianSurface) -> Result<MeridianSurface, DualityError> {
    inverse_gauss_image(mt)?.resample(mt.intervals())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    /// `max |κ_i κ̃_i − 1|` over meridian and rotational directions.
    pub kappa_product: f64,
    /// `max |h − ⟨x̃_θ, x_θ⟩| / g` along the meridian, both for `h` and `h̃`.
    pub h_meridian: f64,
    /// Same for the rotational direction, away from the poles.
    pub h_rotational: f64,
    /// `max |⟨x, x̃⟩|`.
    pub inner_product: f64,
    /// `max |ũ(θ̃_k) − τ̃_k|`: distance between `M̃` and the dual point cloud of `M`.
    pub graph_distance: f64,
    pub intervals: usize,
    pub resampling_error: f64,
}

impl DualityReport {
    pub fn h_residual(&self) -> f64 {
        self.h_meridian.max(self.h_rotational)
    }

    pub fn to_table(&self) -> String {
        let rows = [
            ("intervals", self.intervals as f64),
            ("kappa_product", self.kappa_product),
            ("h_meridian", self.h_meridian),
            ("h_rotational", self.h_rotational),
            ("inner_product", self.inner_product),
            ("graph_distance", self.graph_distance),
            ("resampling_error", self.resampling_error),
        ];
        rows.iter()
            .map(|(k, v)| format!("{k} = {v:.16e}\n"))
            .collect()
    }
}

/// Residuals of the duality identities for a pair `M ⊂ H`, `M̃ ⊂ N₋`.
///
/// Everything is evaluated at `M`'s grid points and their dual latitudes, so
/// a mismatched pair produces large residuals rather than an error.
pub fn duality_report(m: &MeridianSurface, mt: &MeridianSurface) -> Result<DualityReport, DualityError> {
    expect_space(m, SpaceTag::Hyperbolic)?;
    expect_space(mt, SpaceTag::DeSitter)?;
    if m.intervals() != mt.intervals() {
        return Err(DualityError::MismatchedGrids(m.intervals(), mt.intervals()));
    }
    if m.n() != mt.n() {
        return Err(DualityError::MismatchedDimension(m.n(), mt.n()));
    }
    let n = m.n();
    let pg = compute_shape(m)?;
    let image = polar_from(&pg, SpaceTag::DeSitter, n)?;
    let nodes: Vec<f64> = (0..=mt.intervals()).map(|j| mt.theta(j)).collect();
    let dual = EvenSpline::new(&nodes, mt.u())?;
    let (dtheta, _) = stencil::derivatives(&image.theta, m.spacing(), Parity::Odd, Parity::Odd, Order::Fourth);

    let last = m.intervals();
    let mut r = DualityReport {
        kappa_product: 0.0,
        h_meridian: 0.0,
        h_rotational: 0.0,
        inner_product: 0.0,
        graph_distance: 0.0,
        intervals: last,
        resampling_error: image.resampling_error()?,
    };
    for (k, p) in pg.iter().enumerate() {
        let tt = image.theta[k];
        let (ut, pt, ppt) = dual.eval(tt);
        let pole = k == 0 || k == last;
        let q = graph_point(SpaceTag::DeSitter, n, k, tt, ut, pt, ppt, pole, None)?;

        r.graph_distance = r.graph_distance.max((ut - image.u[k]).abs());
        r.kappa_product = r
            .kappa_product
            .max((p.k_mer * q.k_mer - 1.0).abs())
            .max((p.k_rot * q.k_rot - 1.0).abs());
        r.inner_product = r.inner_product.max(dot3(&p.x, &flip(&q.x)).abs());

        let s = dtheta[k];
        let xt_d = flip(&q.x_d).map(|c| c * s);
        let pair = dot3(&xt_d, &p.x_d);
        let h_dual = q.h_mer * s * s;
        r.h_meridian = r
            .h_meridian
            .max((p.h_mer - pair).abs().max((h_dual - pair).abs()) / p.g_mer);
        if !pole {
            let pair = p.x[2] * q.x[2];
            let res = (p.h_rot - pair).abs().max((q.h_rot - pair).abs()) / p.g_rot;
            r.h_rotational = r.h_rotational.max(res);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(a: f64, k: usize) -> MeridianSurface {
        MeridianSurface::constant(SpaceTag::Hyperbolic, 2, k, a).unwrap()
    }

    #[test]
    fn sphere_maps_to_slice() {
        let dual = dualize(&sphere(0.8, 256)).unwrap();
        assert_eq!(dual.space(), SpaceTag::DeSitter);
        for &u in dual.u() {
            assert!((u + 0.8).abs() < 1e-12, "{u}");
        }
        let pg = crate::geometry::compute_shape(&dual).unwrap();
        // tanh 0.8
        assert!((pg[40].k_mer - 0.664036770267848989).abs() < 1e-10);
    }

    #[test]
    fn slice_maps_to_sphere() {
        let slice = MeridianSurface::constant(SpaceTag::DeSitter, 2, 128, -0.8).unwrap();
        let back = dualize_inverse(&slice).unwrap();
        assert_eq!(back.space(), SpaceTag::Hyperbolic);
        assert!(back.u().iter().all(|u| (u - 0.8).abs() < 1e-12));
    }

    #[test]
    fn sphere_slice_report_is_exact() {
        let m = sphere(0.8, 256);
        let mt = MeridianSurface::constant(SpaceTag::DeSitter, 2, 256, -0.8).unwrap();
        let r = duality_report(&m, &mt).unwrap();
        assert!(r.kappa_product < 1e-8, "{r:?}");
        assert!(r.h_residual() < 1e-8, "{r:?}");
        assert!(r.inner_product < 1e-8, "{r:?}");
    }

    #[test]
    fn mismatched_pair_is_reported() {
        let (a, b) = (0.8_f64, 1.1_f64);
        let m = sphere(a, 64);
        let mt = MeridianSurface::constant(SpaceTag::DeSitter, 2, 64, -b).unwrap();
        let r = duality_report(&m, &mt).unwrap();
        let expected = (b.tanh() / a.tanh() - 1.0).abs();
        assert!((r.kappa_product - expected).abs() < 1e-9, "{} vs {expected}", r.kappa_product);
    }

    #[test]
    fn gauss_image_is_orthogonal_to_surface() {
        let m = MeridianSurface::perturbed(SpaceTag::Hyperbolic, 2, 512, 1.0, 0.05, 2).unwrap();
        let img = gauss_image(&m).unwrap();
        for k in 0..=512 {
            let x = m.embed(k);
            let y = flip(&img.points[k]);
            let ip = -x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            assert!(ip.abs() < 1e-10, "{k}: {ip}");
            assert!((-y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_wrong_spaces() {
        let slice = MeridianSurface::constant(SpaceTag::DeSitter, 2, 32, -0.5).unwrap();
        assert!(matches!(dualize(&slice), Err(DualityError::WrongSpace { .. })));
        let future = MeridianSurface::constant(SpaceTag::DeSitter, 2, 32, 0.5).unwrap();
        assert!(matches!(dualize_inverse(&future), Err(DualityError::NotPast { index: 0 })));
    }
}
