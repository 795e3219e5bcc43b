//! Method-of-lines integration of the two dual flows in graph gauge.
//!
//! In de Sitter space the inverse flow `ẋ = −F⁻¹ν` reduces to `u_t = v/F`;
//! in hyperbolic space the direct flow `ẋ = −F̃ν` reduces to
//! `u_t = −ṽF̃` with `ṽ = ⟨ν, ∂_r⟩⁻¹`. Both move umbilic data by
//! `cosh u(t) = cosh u₀ · e^{−t}`.

use thiserror::Error;

use crate::curvature::CurvatureFunction;
use crate::duality::{dualize, DualityError};
use crate::geometry::{compute_geometry, curvatures_into, diagnostics, DiagnosticsRow, GeometryError, MeridianSurface, PointGeometry};
use crate::minkowski::SpaceTag;

/// Steps shorter than this are a failure.
pub const DT_MIN: f64 = 1e-12;
pub const MAX_HALVINGS: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("spherical solution exists only for 0 <= t < {t_star}, got t = {t}")]
    OutsideLifetime { t: f64, t_star: f64 },
    #[error("{flow} flow needs a surface in {expected}")]
    WrongSpace { flow: &'static str, expected: SpaceTag },
    #[error("invalid flow settings: {0}")]
    Settings(String),
    #[error("step failed at t = {t} (dt = {dt}): {source}")]
    StepFailure {
        t: f64,
        dt: f64,
        #[source]
        source: GeometryError,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Duality(#[from] DualityError),
}

/// Speed as a function of `r = F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedFunction {
    /// `Φ(r) = −r⁻¹`
    Inverse,
    /// `Φ(r) = r`
    Direct,
}

impl SpeedFunction {
    pub fn phi(self, r: f64) -> f64 {
        match self {
            Self::Inverse => -1.0 / r,
            Self::Direct => r,
        }
    }

    pub fn phi_dot(self, r: f64) -> f64 {
        match self {
            Self::Inverse => 1.0 / (r * r),
            Self::Direct => 1.0,
        }
    }

    pub fn phi_ddot(self, r: f64) -> f64 {
        match self {
            Self::Inverse => -2.0 / (r * r * r),
            Self::Direct => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    /// Expanding flow in de Sitter space.
    Inverse,
    /// Contracting flow in hyperbolic space.
    Direct,
}

impl FlowKind {
    pub fn space(self) -> SpaceTag {
        match self {
            Self::Inverse => SpaceTag::DeSitter,
            Self::Direct => SpaceTag::Hyperbolic,
        }
    }

    pub fn speed(self) -> SpeedFunction {
        match self {
            Self::Inverse => SpeedFunction::Inverse,
            Self::Direct => SpeedFunction::Direct,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Inverse => "inverse",
            Self::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSettings {
    pub c_cfl: f64,
    pub dt_max: f64,
    /// Use this step instead of the adaptive one (still capped by halvings).
    pub fixed_dt: Option<f64>,
    pub eps_stop: f64,
    pub t_max: f64,
    /// Record a diagnostics row every this many accepted steps.
    pub record_interval: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            c_cfl: 0.2,
            dt_max: 1e-3,
            fixed_dt: None,
            eps_stop: 1e-3,
            t_max: f64::INFINITY,
            record_interval: 100,
        }
    }
}

impl FlowSettings {
    fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: &str| Err(FlowError::Settings(m.to_string()));
        if !(self.c_cfl > 0.0) {
            return bad("c_cfl must be positive");
        }
        if !(self.dt_max >= DT_MIN) {
            return bad("dt_max must be at least 1e-12");
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt >= DT_MIN && dt.is_finite()) {
                return bad("dt must be finite and at least 1e-12");
            }
        }
        if !(self.eps_stop > 0.0) {
            return bad("eps_stop must be positive");
        }
        if !(self.t_max > 0.0) {
            return bad("t_max must be positive");
        }
        if self.record_interval == 0 {
            return bad("record_interval must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub surface: MeridianSurface,
    /// Last accepted step.
    pub dt: f64,
    pub steps: usize,
    pub history: Vec<DiagnosticsRow>,
    geometry: Vec<PointGeometry>,
}

impl FlowState {
    pub fn geometry(&self) -> &[PointGeometry] {
        &self.geometry
    }

    pub fn diagnostics(&self) -> DiagnosticsRow {
        diagnostics(&self.geometry, self.t, self.dt, self.surface.n())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExitReason {
    ReachedStop,
    ReachedTMax,
    StepFailure(String),
}

impl ExitReason {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ReachedStop => "reached_stop",
            Self::ReachedTMax => "reached_t_max",
            Self::StepFailure(_) => "step_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub state: FlowState,
    pub exit: ExitReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub exit_reason: String,
    pub final_t: f64,
    pub steps: usize,
    pub max_pinch_ratio: f64,
}

impl RunOutcome {
    pub fn rows(&self) -> &[DiagnosticsRow] {
        &self.state.history
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            exit_reason: self.exit.label().to_string(),
            final_t: self.state.t,
            steps: self.state.steps,
            max_pinch_ratio: self.rows().iter().map(|r| r.pinch_ratio).fold(1.0, f64::max),
        }
    }
}

/// Closed-form umbilic solution: `cosh u(t) = cosh u₀ · e^{−t}`, keeping the
/// sign of `u₀` (slices in `N₋` have `u₀ < 0`, spheres in `H` have `u₀ > 0`).
pub fn spherical_oracle(u0: f64, t: f64) -> Result<f64, FlowError> {
    let t_star = spherical_lifetime(u0);
    if !(t >= 0.0 && t < t_star) {
        return Err(FlowError::OutsideLifetime { t, t_star });
    }
    if t == 0.0 {
        return Ok(u0);
    }
    Ok(u0.signum() * (u0.cosh() * (-t).exp()).acosh())
}

/// `T* = log cosh u₀`.
pub fn spherical_lifetime(u0: f64) -> f64 {
    u0.cosh().ln()
}

/// `u_t = v/F` for a surface in de Sitter space.
pub fn rhs_inverse(surface: &MeridianSurface, f: &CurvatureFunction) -> Result<Vec<f64>, FlowError> {
    expect(surface, FlowKind::Inverse)?;
    Ok(velocity(FlowKind::Inverse, &compute_geometry(surface, f)?))
}

/// `u_t = −ṽF̃` for a surface in hyperbolic space.
pub fn rhs_direct(surface: &MeridianSurface, f_dual: &CurvatureFunction) -> Result<Vec<f64>, FlowError> {
    expect(surface, FlowKind::Direct)?;
    Ok(velocity(FlowKind::Direct, &compute_geometry(surface, f_dual)?))
}

fn expect(surface: &MeridianSurface, kind: FlowKind) -> Result<(), FlowError> {
    if surface.space() == kind.space() {
        Ok(())
    } else {
        Err(FlowError::WrongSpace {
            flow: kind.name(),
            expected: kind.space(),
        })
    }
}

fn velocity(kind: FlowKind, pg: &[PointGeometry]) -> Vec<f64> {
    pg.iter()
        .map(|p| match kind {
            FlowKind::Inverse => p.v / p.f.value,
            FlowKind::Direct => -p.vt * p.f.value,
        })
        .collect()
}

/// Explicit step size from the linearized diffusion coefficient.
///
/// De Sitter: `c h² min F² / max(ṽ² Σ F_i)`. Hyperbolic: `c h² / max(Σ F̃_i / g_θθ)`.
/// Clamped to `[DT_MIN, dt_max]`.
pub fn adaptive_dt(kind: FlowKind, pg: &[PointGeometry], h: f64, c_cfl: f64, dt_max: f64) -> f64 {
    let dt = match kind {
        FlowKind::Inverse => {
            let num = pg.iter().map(|p| p.f.value * p.f.value).fold(f64::INFINITY, f64::min);
            let den = pg.iter().map(|p| p.vt * p.vt * p.f_trace()).fold(0.0, f64::max);
            c_cfl * h * h * num / den
        }
        FlowKind::Direct => {
            let den = pg.iter().map(|p| p.f_trace() / p.g_mer).fold(0.0, f64::max);
            c_cfl * h * h / den
        }
    };
    if dt.is_nan() {
        DT_MIN
    } else {
        dt.clamp(DT_MIN, dt_max)
    }
}

struct StageWork {
    d1: Vec<f64>,
    d2: Vec<f64>,
    kv: Vec<(f64, f64, f64)>,
}

/// One flow: a kind, the curvature function driving it and step settings.
///
/// For the direct flow `f` is the function evaluated on the hyperbolic
/// surface, normally the dual `F̃` of the de Sitter function.
#[derive(Debug, Clone)]
pub struct Flow {
    kind: FlowKind,
    f: CurvatureFunction,
    settings: FlowSettings,
}

impl Flow {
    pub fn new(kind: FlowKind, f: CurvatureFunction, settings: FlowSettings) -> Result<Self, FlowError> {
        settings.validate()?;
        Ok(Self { kind, f, settings })
    }

    pub fn inverse(f: CurvatureFunction, settings: FlowSettings) -> Result<Self, FlowError> {
        Self::new(FlowKind::Inverse, f, settings)
    }

    /// Direct flow driven by the dual of `f`.
    pub fn direct_dual_of(f: &CurvatureFunction, settings: FlowSettings) -> Result<Self, FlowError> {
        Self::new(FlowKind::Direct, f.dual(), settings)
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn curvature_function(&self) -> &CurvatureFunction {
        &self.f
    }

    pub fn settings(&self) -> &FlowSettings {
        &self.settings
    }

    pub fn start(&self, surface: MeridianSurface) -> Result<FlowState, FlowError> {
        expect(&surface, self.kind)?;
        let geometry = compute_geometry(&surface, &self.f)?;
        let mut state = FlowState {
            t: 0.0,
            surface,
            dt: 0.0,
            steps: 0,
            history: Vec::new(),
            geometry,
        };
        state.history.push(state.diagnostics());
        Ok(state)
    }

    pub fn rhs(&self, surface: &MeridianSurface) -> Result<Vec<f64>, GeometryError> {
        Ok(velocity(self.kind, &compute_geometry(surface, &self.f)?))
    }

    /// Step size the flow would take next, before capping at `t_max`.
    pub fn next_dt(&self, state: &FlowState) -> f64 {
        match self.settings.fixed_dt {
            Some(dt) => dt,
            None => adaptive_dt(
                self.kind,
                &state.geometry,
                state.surface.spacing(),
                self.settings.c_cfl,
                self.settings.dt_max,
            ),
        }
    }

    fn geometry_of(&self, surface: &MeridianSurface, u: Vec<f64>) -> Result<(MeridianSurface, Vec<PointGeometry>), GeometryError> {
        let s = surface.with_u(u)?;
        let pg = compute_geometry(&s, &self.f)?;
        if pg.iter().any(|p| !p.f.value.is_finite() || p.f.value <= 0.0) {
            return Err(GeometryError::NonFinite { index: 0 });
        }
        Ok((s, pg))
    }

    /// `u_t` at stage values `u` from the lean curvature kernel.
    fn stage_velocity(&self, u: &[f64], work: &mut StageWork, out: &mut [f64]) -> Result<(), GeometryError> {
        let space = self.kind.space();
        curvatures_into(space, u, &mut work.d1, &mut work.d2, &mut work.kv)?;
        for (i, &(k_mer, k_rot, v)) in work.kv.iter().enumerate() {
            let f = self.f.axial_value_unchecked(k_mer, k_rot);
            if !(f > 0.0 && f.is_finite()) {
                return Err(GeometryError::NonFinite { index: i });
            }
            out[i] = match self.kind {
                FlowKind::Inverse => v / f,
                FlowKind::Direct => -v * f,
            };
        }
        Ok(())
    }

    /// One classical Runge–Kutta step of exactly `dt`, without retries.
    pub fn try_advance(&self, state: &FlowState, dt: f64) -> Result<(MeridianSurface, Vec<PointGeometry>), GeometryError> {
        let u0 = state.surface.u();
        let len = u0.len();
        let mut work = StageWork {
            d1: vec![0.0; len],
            d2: vec![0.0; len],
            kv: Vec::with_capacity(len),
        };
        let mut k = velocity(self.kind, &state.geometry);
        let mut acc = k.clone();
        let mut stage = vec![0.0; len];
        for (c, w) in [(0.5, 2.0), (0.5, 2.0), (1.0, 1.0)] {
            for i in 0..len {
                stage[i] = u0[i] + c * dt * k[i];
            }
            if let Some(index) = stage.iter().position(|x| !x.is_finite()) {
                return Err(GeometryError::NonFinite { index });
            }
            self.stage_velocity(&stage, &mut work, &mut k)?;
            for i in 0..len {
                acc[i] += w * k[i];
            }
        }
        let u: Vec<f64> = (0..len).map(|i| u0[i] + dt / 6.0 * acc[i]).collect();
        self.geometry_of(&state.surface, u)
    }

    fn accept(&self, state: &mut FlowState, dt: f64, surface: MeridianSurface, geometry: Vec<PointGeometry>) {
        state.t += dt;
        state.dt = dt;
        state.steps += 1;
        state.surface = surface;
        state.geometry = geometry;
        if state.steps % self.settings.record_interval == 0 {
            state.history.push(state.diagnostics());
        }
    }

    /// Advance by `dt`, halving on rejection. The state is untouched on failure.
    pub fn step(&self, state: &mut FlowState, dt: f64) -> Result<f64, FlowError> {
        let mut dt = dt;
        let mut halvings = 0;
        loop {
            match self.try_advance(state, dt) {
                Ok((s, g)) => {
                    self.accept(state, dt, s, g);
                    return Ok(dt);
                }
                Err(source) => {
                    dt *= 0.5;
                    halvings += 1;
                    if halvings > MAX_HALVINGS || dt < DT_MIN {
                        return Err(FlowError::StepFailure { t: state.t, dt, source });
                    }
                }
            }
        }
    }

    pub fn reached_stop(&self, state: &FlowState) -> bool {
        let eps = self.settings.eps_stop;
        let u = state.surface.u();
        match self.kind {
            FlowKind::Inverse => u.iter().any(|&x| x > -eps),
            FlowKind::Direct => u.iter().all(|&x| x < eps),
        }
    }

    fn finish(&self, state: &mut FlowState) {
        let recorded = state.history.last().map(|r| r.t);
        if recorded != Some(state.t) {
            state.history.push(state.diagnostics());
        }
    }

    fn stop_reason(&self, state: &FlowState) -> Option<ExitReason> {
        if self.reached_stop(state) {
            Some(ExitReason::ReachedStop)
        } else if state.t >= self.settings.t_max {
            Some(ExitReason::ReachedTMax)
        } else {
            None
        }
    }

    pub fn run(&self, surface: MeridianSurface) -> Result<RunOutcome, FlowError> {
        self.run_observed(surface, |_| {})
    }

    /// As [`Self::run`], calling `observe` after the start and after every
    /// accepted step.
    pub fn run_observed(&self, surface: MeridianSurface, mut observe: impl FnMut(&FlowState)) -> Result<RunOutcome, FlowError> {
        let mut state = self.start(surface)?;
        observe(&state);
        let exit = loop {
            if let Some(reason) = self.stop_reason(&state) {
                break reason;
            }
            let dt = self.next_dt(&state).min(self.settings.t_max - state.t);
            if let Err(e) = self.step(&mut state, dt) {
                break ExitReason::StepFailure(e.to_string());
            }
            observe(&state);
        };
        self.finish(&mut state);
        Ok(RunOutcome { state, exit })
    }
}

/// Sample of the distance between the de Sitter flow and the dual of the
/// hyperbolic flow at a common time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualDistance {
    pub t: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPairOutcome {
    pub desitter: RunOutcome,
    pub hyperbolic: RunOutcome,
    /// One sample per de Sitter diagnostics row over the common interval.
    pub distance: Vec<DualDistance>,
}

impl DualPairOutcome {
    pub fn max_distance(&self) -> f64 {
        self.distance.iter().map(|d| d.distance).fold(0.0, f64::max)
    }
}

/// Run the de Sitter flow from `surface` and the hyperbolic flow from its
/// dual with a common step, then let the survivor finish alone.
pub fn run_dual_pair(inverse: &Flow, direct: &Flow, surface: MeridianSurface) -> Result<DualPairOutcome, FlowError> {
    run_dual_pair_observed(inverse, direct, surface, |_, _| {})
}

/// As [`run_dual_pair`], calling `observe` with each flow's state after the
/// start and after every accepted step.
pub fn run_dual_pair_observed(
    inverse: &Flow,
    direct: &Flow,
    surface: MeridianSurface,
    mut observe: impl FnMut(FlowKind, &FlowState),
) -> Result<DualPairOutcome, FlowError> {
    if inverse.kind != FlowKind::Inverse || direct.kind != FlowKind::Direct {
        return Err(FlowError::Settings("dual pair needs an inverse and a direct flow".into()));
    }
    let dual = crate::duality::dualize_inverse(&surface)?;
    let mut sn = inverse.start(surface)?;
    let mut sh = direct.start(dual)?;
    observe(FlowKind::Inverse, &sn);
    observe(FlowKind::Direct, &sh);
    let t_max = inverse.settings.t_max.min(direct.settings.t_max);
    let mut distance = vec![DualDistance {
        t: 0.0,
        distance: dualize(&sh.surface)?.sup_distance(&sn.surface),
    }];

    let mut exit_n = None;
    let mut exit_h = None;
    while exit_n.is_none() && exit_h.is_none() {
        exit_n = inverse.stop_reason(&sn);
        exit_h = direct.stop_reason(&sh);
        if exit_n.is_some() || exit_h.is_some() {
            break;
        }
        let mut dt = inverse.next_dt(&sn).min(direct.next_dt(&sh)).min(t_max - sn.t);
        let mut halvings = 0;
        loop {
            let a = inverse.try_advance(&sn, dt);
            let b = a.as_ref().ok().map(|_| direct.try_advance(&sh, dt));
            match (a, b) {
                (Ok((s1, g1)), Some(Ok((s2, g2)))) => {
                    inverse.accept(&mut sn, dt, s1, g1);
                    direct.accept(&mut sh, dt, s2, g2);
                    observe(FlowKind::Inverse, &sn);
                    observe(FlowKind::Direct, &sh);
                    break;
                }
                (a, b) => {
                    dt *= 0.5;
                    halvings += 1;
                    if halvings > MAX_HALVINGS || dt < DT_MIN {
                        let source = match (a, b) {
                            (Err(e), _) | (_, Some(Err(e))) => e,
                            _ => unreachable!(),
                        };
                        let msg = FlowError::StepFailure { t: sn.t, dt, source }.to_string();
                        exit_n = Some(ExitReason::StepFailure(msg.clone()));
                        exit_h = Some(ExitReason::StepFailure(msg));
                        break;
                    }
                }
            }
        }
        if sn.steps % inverse.settings.record_interval == 0 && sn.steps > 0 && exit_n.is_none() {
            distance.push(DualDistance {
                t: sn.t,
                distance: dualize(&sh.surface)?.sup_distance(&sn.surface),
            });
        }
    }
    if distance.last().map(|d| d.t) != Some(sn.t) {
        if let Ok(d) = dualize(&sh.surface) {
            distance.push(DualDistance {
                t: sn.t,
                distance: d.sup_distance(&sn.surface),
            });
        }
    }

    let mut finish_alone = |flow: &Flow, state: &mut FlowState, exit: Option<ExitReason>| -> ExitReason {
        let exit = match exit {
            Some(e) => e,
            None => loop {
                if let Some(reason) = flow.stop_reason(state) {
                    break reason;
                }
                let dt = flow.next_dt(state).min(flow.settings.t_max - state.t);
                if let Err(e) = flow.step(state, dt) {
                    break ExitReason::StepFailure(e.to_string());
                }
                observe(flow.kind, state);
            },
        };
        flow.finish(state);
        exit
    };
    let exit_n = finish_alone(inverse, &mut sn, exit_n);
    let exit_h = finish_alone(direct, &mut sh, exit_h);
    Ok(DualPairOutcome {
        desitter: RunOutcome { state: sn, exit: exit_n },
        hyperbolic: RunOutcome { state: sh, exit: exit_h },
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const T_STAR_1: f64 = 0.433_780_830_483_027_2;

    fn pm(p: f64) -> CurvatureFunction {
        CurvatureFunction::power_mean(p, 2).unwrap()
    }

    fn slice(c: f64, k: usize) -> MeridianSurface {
        MeridianSurface::constant(SpaceTag::DeSitter, 2, k, c).unwrap()
    }

    #[test]
    fn oracle_values() {
        assert!((spherical_lifetime(-1.0) - T_STAR_1).abs() < 1e-15);
        assert!((spherical_oracle(-1.0, 0.2).unwrap() + 0.710_712_578_260_382_8).abs() < 1e-14);
        assert_eq!(spherical_oracle(-1.0, 0.0).unwrap(), -1.0);
        assert!(spherical_oracle(-1.0, T_STAR_1).is_err());
        assert!(spherical_oracle(-1.0, -0.1).is_err());
    }

    #[test]
    fn slice_rhs() {
        let r = rhs_inverse(&slice(-1.0, 64), &pm(2.0)).unwrap();
        // coth 1
        assert!(r.iter().all(|x| (x - 1.313_035_285_499_331_3).abs() < 1e-12));
    }

    #[test]
    fn sphere_rhs_is_normalized() {
        let s = MeridianSurface::constant(SpaceTag::Hyperbolic, 2, 64, 1.0).unwrap();
        for f in [pm(1.0).dual(), pm(2.0).dual()] {
            let r = rhs_direct(&s, &f).unwrap();
            assert!(r.iter().all(|x| (x + 1.313_035_285_499_331_3).abs() < 1e-12));
        }
    }

    #[test]
    fn rhs_signs_on_perturbed_data() {
        let s = MeridianSurface::perturbed(SpaceTag::DeSitter, 2, 64, -1.0, 0.1, 3).unwrap();
        assert!(rhs_inverse(&s, &pm(4.0)).unwrap().iter().all(|&x| x > 0.0));
        let h = MeridianSurface::perturbed(SpaceTag::Hyperbolic, 2, 64, 1.0, 0.1, 2).unwrap();
        assert!(rhs_direct(&h, &pm(2.0).dual()).unwrap().iter().all(|&x| x < 0.0));
    }

    #[test]
    fn adaptive_dt_on_slice() {
        let f = pm(1.0);
        let s = slice(-1.0, 256);
        let pg = compute_geometry(&s, &f).unwrap();
        let dt = adaptive_dt(FlowKind::Inverse, &pg, s.spacing(), 0.2, 1e-3);
        assert!((dt / 1.747_016_537_704_76e-5 - 1.0).abs() < 1e-12, "{dt}");
        let s2 = slice(-1.0, 512);
        let pg2 = compute_geometry(&s2, &f).unwrap();
        let dt2 = adaptive_dt(FlowKind::Inverse, &pg2, s2.spacing(), 0.2, 1e-3);
        assert!((dt / dt2 - 4.0).abs() < 1e-12);
        assert_eq!(adaptive_dt(FlowKind::Inverse, &pg, s.spacing(), 1e6, 1e-3), 1e-3);
    }

    #[test]
    fn slices_stay_slices() {
        let flow = Flow::inverse(pm(2.0), FlowSettings { t_max: 0.05, ..Default::default() }).unwrap();
        let out = flow.run(slice(-1.0, 64)).unwrap();
        assert_eq!(out.exit, ExitReason::ReachedTMax);
        let u = out.state.surface.u();
        assert!(u.iter().all(|&x| x == u[0]));
        assert!((out.state.t - 0.05).abs() < 1e-15);
    }

    #[test]
    fn spherical_run_matches_oracle() {
        let settings = FlowSettings {
            fixed_dt: Some(1e-4),
            t_max: 0.3,
            ..Default::default()
        };
        let flow = Flow::inverse(pm(1.0), settings).unwrap();
        let out = flow.run(slice(-1.0, 32)).unwrap();
        let exact = spherical_oracle(-1.0, out.state.t).unwrap();
        assert!(((out.state.surface.u()[5] - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn rk4_refinement_is_fourth_order() {
        let run = |dt: f64| {
            let settings = FlowSettings {
                fixed_dt: Some(dt),
                t_max: 0.2,
                ..Default::default()
            };
            let flow = Flow::inverse(pm(2.0), settings).unwrap();
            let s = MeridianSurface::perturbed(SpaceTag::DeSitter, 2, 32, -1.0, 0.05, 2).unwrap();
            flow.run(s).unwrap().state.surface
        };
        let (a, b, c) = (run(4e-3), run(2e-3), run(1e-3));
        let ratio = a.sup_distance(&b) / b.sup_distance(&c);
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn lean_kernel_matches_full_geometry() {
        for (space, c) in [(SpaceTag::DeSitter, -0.9), (SpaceTag::Hyperbolic, 0.9)] {
            let s = MeridianSurface::perturbed(space, 3, 64, c, 0.08, 3).unwrap();
            let f = CurvatureFunction::power_mean(2.0, 3).unwrap();
            let pg = compute_geometry(&s, &f).unwrap();
            let (mut d1, mut d2, mut kv) = (vec![0.0; 65], vec![0.0; 65], Vec::new());
            crate::geometry::curvatures_into(space, s.u(), &mut d1, &mut d2, &mut kv).unwrap();
            for (p, (km, kr, v)) in pg.iter().zip(&kv) {
                assert!((p.k_mer - km).abs() < 1e-12 * km);
                assert!((p.k_rot - kr).abs() < 1e-12 * kr);
                let speed = if space == SpaceTag::DeSitter { p.v } else { p.vt };
                assert!((speed - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn step_failure_keeps_last_state() {
        // even after every halving the step is far past the slice's lifetime
        let flow = Flow::inverse(pm(1.0), FlowSettings::default()).unwrap();
        let s = slice(-1.0, 32);
        let mut state = flow.start(s.clone()).unwrap();
        let err = flow.step(&mut state, 1e7).unwrap_err();
        assert!(matches!(err, FlowError::StepFailure { .. }), "{err}");
        assert_eq!(state.surface, s);
        assert_eq!(state.steps, 0);
        assert_eq!(state.t, 0.0);
    }
}
