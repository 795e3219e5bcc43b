//! Residual checks of the evolution equations for `F` and `χ` along the
//! inverse flow in de Sitter space.
//!
//! The equations hold at fixed parameter of the normal flow `ẋ = Φν`, so the
//! surface is tracked by particles moving with exactly that velocity; time
//! derivatives are centred differences at a fixed particle. Covariant
//! derivatives along the surface use arclength on the meridian and the orbit
//! radius `ρ`: for axially symmetric `f`, `∇²f = f_ss` along the meridian and
//! `(ρ_s/ρ) f_s` along the orbits.

use std::fmt::Write as _;

use crate::curvature::CurvatureFunction;
use crate::flow::{FlowError, SpeedFunction, MAX_HALVINGS};
use crate::geometry::{ambient_point, embed3, GeometryError, MeridianSurface, PointGeometry, V3, DE_SITTER};
use crate::minkowski::SpaceTag;
use crate::stencil::{self, Order, Parity};

/// Particle paths of a de Sitter surface under `ẋ = −F⁻¹ν`, one sample per step.
#[derive(Debug, Clone)]
pub struct LagrangianTrajectory {
    n: usize,
    f: CurvatureFunction,
    dt: f64,
    times: Vec<f64>,
    positions: Vec<Vec<V3>>,
}

impl LagrangianTrajectory {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn curvature_function(&self) -> &CurvatureFunction {
        &self.f
    }

    /// Step between consecutive samples.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn intervals(&self) -> usize {
        self.positions[0].len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self, sample: usize) -> &[V3] {
        &self.positions[sample]
    }

    /// Geometry of every particle at one sample.
    pub fn geometry(&self, sample: usize) -> Result<Vec<PointGeometry>, GeometryError> {
        particle_geometry(&self.positions[sample], self.n, &self.f)
    }

    /// `max |q(x) − 1|` over all particles and samples.
    pub fn quadric_residual(&self) -> f64 {
        self.positions
            .iter()
            .flatten()
            .map(|x| (-x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Whether particle latitudes stay strictly increasing along the meridian.
    pub fn latitudes_monotone(&self) -> bool {
        self.positions.iter().all(|pos| {
            pos.windows(2)
                .all(|w| w[1][2].atan2(w[1][1]) > w[0][2].atan2(w[0][1]) || w[1][2] == 0.0 && w[1][1] < 0.0)
        })
    }

    /// Graph height `u = asinh x⁰` of every particle at one sample.
    pub fn heights(&self, sample: usize) -> Vec<f64> {
        self.positions[sample].iter().map(|x| x[0].asinh()).collect()
    }
}

/// Chart coordinates `(u, θ)` of every particle.
fn chart(pos: &[V3]) -> (Vec<f64>, Vec<f64>) {
    let last = pos.len() - 1;
    let u = pos.iter().map(|x| x[0].asinh()).collect();
    let theta = pos
        .iter()
        .enumerate()
        .map(|(k, x)| match k {
            0 => 0.0,
            _ if k == last => std::f64::consts::PI,
            _ => x[2].atan2(x[1]),
        })
        .collect();
    (u, theta)
}

/// Geometry of the particle curve `ξ ↦ x(ξ)`.
///
/// `u(ξ)` and `θ(ξ)` are differenced (even and odd about the poles) and the
/// embedding derivatives assembled by the chain rule, so tangents are exact
/// wherever the chart derivatives are.
fn particle_geometry(pos: &[V3], n: usize, f: &CurvatureFunction) -> Result<Vec<PointGeometry>, GeometryError> {
    let last = pos.len() - 1;
    let h = std::f64::consts::PI / last as f64;
    let (u, theta) = chart(pos);
    let (u1, u2) = stencil::derivatives(&u, h, Parity::Even, Parity::Even, Order::Fourth);
    let (t1, t2) = stencil::derivatives(&theta, h, Parity::Odd, Parity::Odd, Order::Fourth);
    (0..=last)
        .map(|k| {
            let (ch, sh) = (u[k].cosh(), u[k].sinh());
            let (st, ct) = theta[k].sin_cos();
            let x = [sh, ch * ct, ch * st];
            let xu = [ch, sh * ct, sh * st];
            let xt = [0.0, -ch * st, ch * ct];
            let xut = [0.0, -sh * st, sh * ct];
            let xtt = [0.0, -ch * ct, -ch * st];
            let (a, b, aa, bb) = (u1[k], t1[k], u2[k], t2[k]);
            let xd = std::array::from_fn(|c| xu[c] * a + xt[c] * b);
            let xdd = std::array::from_fn(|c| {
                x[c] * a * a + 2.0 * xut[c] * a * b + xtt[c] * b * b + xu[c] * aa + xt[c] * bb
            });
            ambient_point(SpaceTag::DeSitter, n, k, x, xd, xdd, k == 0 || k == last, Some(f))
        })
        .collect()
}

fn velocities(pos: &[V3], n: usize, f: &CurvatureFunction) -> Result<Vec<V3>, GeometryError> {
    let phi = SpeedFunction::Inverse;
    Ok(particle_geometry(pos, n, f)?
        .iter()
        .map(|p| p.nu.map(|c| phi.phi(p.f.value) * c))
        .collect())
}

fn project(x: &mut V3) {
    let q = -x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    let s = 1.0 / q.sqrt();
    x.iter_mut().for_each(|c| *c *= s);
}

fn rk4(pos: &[V3], dt: f64, n: usize, f: &CurvatureFunction) -> Result<Vec<V3>, GeometryError> {
    let shifted = |k: &[V3], c: f64| -> Vec<V3> {
        pos.iter()
            .zip(k)
            .map(|(x, v)| [x[0] + c * v[0], x[1] + c * v[1], x[2] + c * v[2]])
            .collect()
    };
    let k1 = velocities(pos, n, f)?;
    let k2 = velocities(&shifted(&k1, 0.5 * dt), n, f)?;
    let k3 = velocities(&shifted(&k2, 0.5 * dt), n, f)?;
    let k4 = velocities(&shifted(&k3, dt), n, f)?;
    let mut out: Vec<V3> = (0..pos.len())
        .map(|i| {
            let mut x = pos[i];
            for c in 0..3 {
                x[c] += dt / 6.0 * (k1[i][c] + 2.0 * (k2[i][c] + k3[i][c]) + k4[i][c]);
            }
            project(&mut x);
            x
        })
        .collect();
    // validate the accepted positions
    particle_geometry(&out, n, f)?;
    // keep the poles on the axis exactly
    let last = out.len() - 1;
    out[0][2] = 0.0;
    out[last][2] = 0.0;
    Ok(out)
}

/// Advance by `dt`, splitting into halves on rejection.
fn advance(pos: &[V3], dt: f64, depth: u32, n: usize, f: &CurvatureFunction) -> Result<Vec<V3>, GeometryError> {
    match rk4(pos, dt, n, f) {
        Ok(p) => Ok(p),
        Err(e) if depth >= MAX_HALVINGS => Err(e),
        Err(_) => {
            let mid = advance(pos, 0.5 * dt, depth + 1, n, f)?;
            advance(&mid, 0.5 * dt, depth + 1, n, f)
        }
    }
}

/// Integrate particles from the grid points of `surface` up to `t_end`.
///
/// The number of steps is `⌈t_end/dt⌉`; the step is shrunk slightly so that
/// the last sample lands on `t_end`.
pub fn evolve_lagrangian(
    surface: &MeridianSurface,
    f: &CurvatureFunction,
    t_end: f64,
    dt: f64,
) -> Result<LagrangianTrajectory, FlowError> {
    if surface.space() != SpaceTag::DeSitter {
        return Err(FlowError::WrongSpace {
            flow: "inverse",
            expected: SpaceTag::DeSitter,
        });
    }
    if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite()) {
        return Err(FlowError::Settings("need t_end > 0 and dt > 0".into()));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let n = surface.n();
    let first: Vec<V3> = (0..=surface.intervals())
        .map(|k| embed3(SpaceTag::DeSitter, surface.u()[k], surface.theta(k)))
        .collect();
    particle_geometry(&first, n, f)?;
    let mut positions = vec![first];
    let mut times = vec![0.0];
    for m in 0..steps {
        let next = advance(&positions[m], dt, 0, n, f).map_err(|source| FlowError::StepFailure {
            t: times[m],
            dt,
            source,
        })?;
        positions.push(next);
        times.push((m + 1) as f64 * dt);
    }
    Ok(LagrangianTrajectory {
        n,
        f: f.clone(),
        dt,
        times,
        positions,
    })
}

/// Discretization used when forming residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidualOptions {
    /// Stencil for the surface derivatives of `χ`, `F`, `σ` and `ρ`.
    pub stencil: Order,
    /// Half-width, in samples, of the centred time difference.
    pub window: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            stencil: Order::Second,
            window: 1,
        }
    }
}

/// Pointwise residuals at one particle and sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResidual {
    /// Equation for `χ = ṽ cosh τ`.
    pub chi: f64,
    /// Equation for `F`.
    pub f: f64,
    /// Equation for `Φ = −1/F`, assembled from the same derivatives.
    pub phi: f64,
}

/// Meridian arclength derivatives of a sampled function.
struct ArcDerivatives {
    /// `f_s`
    d1: Vec<f64>,
    /// `∇²f` along the meridian
    mer: Vec<f64>,
    /// `∇²f` along an orbit
    rot: Vec<f64>,
}

fn arc_derivatives(values: &[f64], sigma: &[f64], sigma_xi: &[f64], rho_s_over_rho: &[f64], order: Order) -> ArcDerivatives {
    let last = values.len() - 1;
    let h = std::f64::consts::PI / last as f64;
    let (fx, fxx) = stencil::derivatives(values, h, Parity::Even, Parity::Even, order);
    let mut out = ArcDerivatives {
        d1: vec![0.0; last + 1],
        mer: vec![0.0; last + 1],
        rot: vec![0.0; last + 1],
    };
    for k in 0..=last {
        let s = sigma[k];
        out.d1[k] = fx[k] / s;
        out.mer[k] = fxx[k] / (s * s) - fx[k] * sigma_xi[k] / (s * s * s);
        out.rot[k] = if k == 0 || k == last {
            out.mer[k]
        } else {
            rho_s_over_rho[k] * out.d1[k]
        };
    }
    out
}

/// Residuals of all particles at interior sample `m`.
pub fn residuals_at(
    traj: &LagrangianTrajectory,
    m: usize,
    options: ResidualOptions,
) -> Result<Vec<PointResidual>, GeometryError> {
    let w = options.window.max(1);
    assert!(m >= w && m + w < traj.times.len(), "sample {m} has no centred window");
    let before = traj.geometry(m - w)?;
    let now = traj.geometry(m)?;
    let after = traj.geometry(m + w)?;
    Ok(residuals_from(traj, &before, &now, &after, w, options.stencil))
}

fn residuals_from(
    traj: &LagrangianTrajectory,
    before: &[PointGeometry],
    now: &[PointGeometry],
    after: &[PointGeometry],
    w: usize,
    order: Order,
) -> Vec<PointResidual> {
    let last = now.len() - 1;
    let h = std::f64::consts::PI / last as f64;
    let span = 2.0 * w as f64 * traj.dt;
    let n1 = (traj.n - 1) as f64;
    let k_n = DE_SITTER.k_n;

    let sigma: Vec<f64> = now.iter().map(|p| p.g_mer.sqrt()).collect();
    let rho: Vec<f64> = now.iter().map(|p| p.x[2]).collect();
    let (sigma_xi, _) = stencil::derivatives(&sigma, h, Parity::Even, Parity::Even, order);
    let (rho_xi, _) = stencil::derivatives(&rho, h, Parity::Odd, Parity::Odd, order);
    let rho_ratio: Vec<f64> = (0..=last)
        .map(|k| if k == 0 || k == last { 0.0 } else { rho_xi[k] / sigma[k] / rho[k] })
        .collect();

    let chi: Vec<f64> = now.iter().map(|p| p.chi).collect();
    let fv: Vec<f64> = now.iter().map(|p| p.f.value).collect();
    let dchi = arc_derivatives(&chi, &sigma, &sigma_xi, &rho_ratio, order);
    let df = arc_derivatives(&fv, &sigma, &sigma_xi, &rho_ratio, order);

    (0..=last)
        .map(|k| {
            let p = &now[k];
            let f = p.f.value;
            let (fm, fr) = (p.f.d_mer, p.f.d_rot);
            let phi_dot = SpeedFunction::Inverse.phi_dot(f);
            let hh = p.f_weighted_curvature_square();
            let trace = p.f_trace();

            let chi_t = (after[k].chi - before[k].chi) / span;
            let chi_ell = fm * dchi.mer[k] + n1 * fr * dchi.rot[k];
            // the H̄ term carries Φ̇F + Φ = 0 for Φ = −1/F
            let r_chi = chi_t - phi_dot * chi_ell + phi_dot * hh * chi[k];

            let f_t = (after[k].f.value - before[k].f.value) / span;
            let f_ell = fm * df.mer[k] + n1 * fr * df.rot[k];
            let grad2 = fm * df.d1[k] * df.d1[k];
            let rhs_f = phi_dot * hh * f - 2.0 / f * phi_dot * grad2 - k_n * phi_dot * trace * f;
            let r_f = f_t - phi_dot * f_ell - rhs_f;

            // Φ-equation from the same derivatives through Φ = −1/F
            let phi = -1.0 / f;
            let inv2 = 1.0 / (f * f);
            let phi_t = inv2 * f_t;
            let phi_mer = inv2 * df.mer[k] - 2.0 * inv2 / f * df.d1[k] * df.d1[k];
            let phi_rot = inv2 * df.rot[k];
            let phi_ell = fm * phi_mer + n1 * fr * phi_rot;
            let rhs_phi = -phi_dot * hh * phi + k_n * phi_dot * trace * phi;
            let r_phi = phi_t - phi_dot * phi_ell - rhs_phi;

            PointResidual {
                chi: r_chi,
                f: r_f,
                phi: r_phi,
            }
        })
        .collect()
}

/// Sup-norm residuals over all particles and every sample with a full window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSummary {
    pub chi: f64,
    pub f: f64,
    pub phi: f64,
    /// `max |R_F − F² R_Φ|`, the algebraic consistency of the two forms.
    pub identity: f64,
}

pub fn residual_summary(traj: &LagrangianTrajectory, options: ResidualOptions) -> Result<ResidualSummary, FlowError> {
    let w = options.window.max(1);
    if traj.times.len() < 2 * w + 1 || traj.times.len() < 5 {
        return Err(FlowError::Settings(format!(
            "need at least {} samples for the residuals, have {}",
            (2 * w + 1).max(5),
            traj.times.len()
        )));
    }
    let geometry: Vec<Vec<PointGeometry>> = (0..traj.times.len())
        .map(|m| traj.geometry(m))
        .collect::<Result<_, _>>()?;
    let mut s = ResidualSummary {
        chi: 0.0,
        f: 0.0,
        phi: 0.0,
        identity: 0.0,
    };
    for m in w..traj.times.len() - w {
        let res = residuals_from(traj, &geometry[m - w], &geometry[m], &geometry[m + w], w, options.stencil);
        for (r, p) in res.iter().zip(&geometry[m]) {
            let f = p.f.value;
            s.chi = s.chi.max(r.chi.abs());
            s.f = s.f.max(r.f.abs());
            s.phi = s.phi.max(r.phi.abs());
            s.identity = s.identity.max((r.f - f * f * r.phi).abs());
        }
    }
    Ok(s)
}

/// Sup-norm residual of the `χ` equation.
pub fn residual_chi(traj: &LagrangianTrajectory) -> Result<f64, FlowError> {
    Ok(residual_summary(traj, ResidualOptions::default())?.chi)
}

/// Sup-norm residual of the `F` equation.
#[allow(non_snake_case)]
pub fn residual_F(traj: &LagrangianTrajectory) -> Result<f64, FlowError> {
    Ok(residual_summary(traj, ResidualOptions::default())?.f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementRow {
    pub intervals: usize,
    pub dt: f64,
    pub residuals: ResidualSummary,
}

/// Residuals of one initial surface family at several resolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementReport {
    pub rows: Vec<RefinementRow>,
}

impl RefinementReport {
    /// Run `initial(K)` to `t_end` at each `(K, dt)`.
    pub fn run(
        initial: impl Fn(usize) -> Result<MeridianSurface, GeometryError>,
        f: &CurvatureFunction,
        t_end: f64,
        resolutions: &[(usize, f64)],
        options: ResidualOptions,
    ) -> Result<Self, FlowError> {
        let rows = resolutions
            .iter()
            .map(|&(k, dt)| {
                let traj = evolve_lagrangian(&initial(k)?, f, t_end, dt)?;
                Ok(RefinementRow {
                    intervals: k,
                    dt,
                    residuals: residual_summary(&traj, options)?,
                })
            })
            .collect::<Result<_, FlowError>>()?;
        Ok(Self { rows })
    }

    /// Ratios of consecutive `χ` and `F` residuals.
    pub fn ratios(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .map(|w| {
                (
                    w[0].residuals.chi / w[1].residuals.chi,
                    w[0].residuals.f / w[1].residuals.f,
                )
            })
            .collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("K dt residual_chi ratio_chi residual_F ratio_F\n");
        for (i, r) in self.rows.iter().enumerate() {
            let (rc, rf) = match i {
                0 => ("-".to_string(), "-".to_string()),
                _ => {
                    let p = &self.rows[i - 1].residuals;
                    (
                        format!("{:.3}", p.chi / r.residuals.chi),
                        format!("{:.3}", p.f / r.residuals.f),
                    )
                }
            };
            let _ = writeln!(
                out,
                "{} {:.6e} {:.6e} {} {:.6e} {}",
                r.intervals, r.dt, r.residuals.chi, rc, r.residuals.f, rf
            );
        }
        out
    }
}
