//! Executes a validated configuration and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use dualflow::curvature::property_suite;
use dualflow::duality::{dualize, duality_report, DualityReport};
use dualflow::flow::{run_dual_pair_observed, ExitReason, Flow, FlowError, FlowKind, FlowSettings, FlowState, RunOutcome};
use dualflow::geometry::compute_shape;
use dualflow::snapshot::{parse_snapshot, surface_from_rows, write_snapshot};
use dualflow::verify::{RefinementReport, ResidualOptions};
use dualflow::{DiagnosticsRow, MeridianSurface, SpaceTag};

use crate::config::{InitialSpec, Preset, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Residual runs default to a short horizon at this step.
pub const RESIDUAL_T_END: f64 = 2e-3;
pub const RESIDUAL_DT: f64 = 2e-5;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Config(_) => EXIT_CONFIG,
            DriverError::Io { .. } => EXIT_IO,
            DriverError::Flow(_) => EXIT_FAILURE,
        }
    }
}

impl From<dualflow::duality::DualityError> for DriverError {
    fn from(e: dualflow::duality::DualityError) -> Self {
        DriverError::Flow(e.into())
    }
}

/// What a finished run left behind.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub exit_code: i32,
    /// Contents of `summary.txt`, in order.
    pub summary: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, DriverError> {
        fs::create_dir_all(dir).map_err(|source| DriverError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), DriverError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| DriverError::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
        fs::write(&path, contents).map_err(|source| DriverError::Io { path: path.clone(), source })?;
        self.files.push(path);
        Ok(())
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow], extra: Option<(&str, &[Option<f64>])>) -> String {
    let mut out = DiagnosticsRow::COLUMNS.join(",");
    if let Some((name, _)) = extra {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.values().iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        if let Some((_, col)) = extra {
            match col.get(i).copied().flatten() {
                Some(v) => {
                    let _ = write!(out, ",{v:.16e}");
                }
                None => out.push_str(",nan"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn summary_text(summary: &[(String, String)]) -> String {
    summary.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn load_initial(config: &RunConfig, space: SpaceTag) -> Result<MeridianSurface, DriverError> {
    let spec = config.initial.as_ref().expect("validated");
    let surface = match spec.build(space, config.n, config.intervals) {
        Some(s) => s.map_err(|e| DriverError::Config(format!("initial: {e}")))?,
        None => {
            let InitialSpec::File(path) = spec else { unreachable!() };
            let text = fs::read_to_string(path).map_err(|source| DriverError::Io {
                path: path.clone(),
                source,
            })?;
            let rows = parse_snapshot(&text).map_err(|e| DriverError::Config(format!("{}: {e}", path.display())))?;
            let s = surface_from_rows(&rows, space, config.n)
                .map_err(|e| DriverError::Config(format!("{}: {e}", path.display())))?;
            if s.intervals() != config.intervals {
                return Err(DriverError::Config(format!(
                    "{}: file has K = {} but the config says K = {}",
                    path.display(),
                    s.intervals(),
                    config.intervals
                )));
            }
            s
        }
    };
    compute_shape(&surface).map_err(|e| DriverError::Config(format!("initial: surface is not admissible: {e}")))?;
    Ok(surface)
}

fn settings(config: &RunConfig) -> FlowSettings {
    FlowSettings {
        c_cfl: config.c_cfl,
        dt_max: config.dt_max,
        fixed_dt: config.dt,
        eps_stop: config.eps_stop,
        t_max: config.t_max.unwrap_or(f64::INFINITY),
        record_interval: config.record_interval,
    }
}

fn tag(kind: FlowKind) -> &'static str {
    match kind {
        FlowKind::Inverse => "desitter",
        FlowKind::Direct => "hyperbolic",
    }
}

/// Writes a snapshot every `interval` accepted steps (0: only the start),
/// remembering the first write error.
struct Snapshots<'a> {
    artifacts: &'a mut Artifacts,
    interval: usize,
    error: Option<DriverError>,
    last: [Option<usize>; 2],
}

impl Snapshots<'_> {
    fn observe(&mut self, kind: FlowKind, state: &FlowState) {
        let due = state.steps == 0 || (self.interval > 0 && state.steps % self.interval == 0);
        if due {
            self.write(kind, state);
        }
    }

    fn write(&mut self, kind: FlowKind, state: &FlowState) {
        let slot = kind as usize;
        if self.error.is_some() || self.last[slot] == Some(state.steps) {
            return;
        }
        let name = format!("snapshots/{}_{:08}.txt", tag(kind), state.steps);
        if let Err(e) = self.artifacts.write(&name, &write_snapshot(state.geometry())) {
            self.error = Some(e);
        }
        self.last[slot] = Some(state.steps);
    }

    fn finish(self) -> Result<(), DriverError> {
        self.error.map_or(Ok(()), Err)
    }
}

fn outcome_summary(prefix: &str, outcome: &RunOutcome, summary: &mut Vec<(String, String)>) {
    let s = outcome.summary();
    summary.push((format!("{prefix}exit_reason"), s.exit_reason));
    summary.push((format!("{prefix}final_t"), real(s.final_t)));
    summary.push((format!("{prefix}steps"), s.steps.to_string()));
    summary.push((format!("{prefix}max_pinch_ratio"), real(s.max_pinch_ratio)));
    if let ExitReason::StepFailure(msg) = &outcome.exit {
        summary.push((format!("{prefix}failure"), msg.clone()));
    }
}

fn failed(outcome: &RunOutcome) -> bool {
    matches!(outcome.exit, ExitReason::StepFailure(_))
}

fn run_single(config: &RunConfig, artifacts: &mut Artifacts, summary: &mut Vec<(String, String)>) -> Result<i32, DriverError> {
    let f = config.curvature_function();
    let flow = match config.preset {
        Preset::InverseDesitter => Flow::inverse(f, settings(config))?,
        _ => Flow::direct_dual_of(&f, settings(config))?,
    };
    let surface = load_initial(config, flow.kind().space())?;
    let mut snaps = Snapshots {
        artifacts,
        interval: config.snapshot_interval,
        error: None,
        last: [None, None],
    };
    let outcome = flow.run_observed(surface, |s| snaps.observe(flow.kind(), s))?;
    snaps.write(flow.kind(), &outcome.state);
    snaps.finish()?;

    artifacts.write("diagnostics.csv", &diagnostics_csv(outcome.rows(), None))?;
    outcome_summary("", &outcome, summary);
    Ok(if failed(&outcome) { EXIT_FAILURE } else { EXIT_OK })
}

fn run_pair(config: &RunConfig, artifacts: &mut Artifacts, summary: &mut Vec<(String, String)>) -> Result<i32, DriverError> {
    let f = config.curvature_function();
    let inverse = Flow::inverse(f.clone(), settings(config))?;
    let direct = Flow::direct_dual_of(&f, settings(config))?;
    let surface = load_initial(config, SpaceTag::DeSitter)?;
    let mut snaps = Snapshots {
        artifacts,
        interval: config.snapshot_interval,
        error: None,
        last: [None, None],
    };
    let outcome = run_dual_pair_observed(&inverse, &direct, surface, |kind, s| snaps.observe(kind, s))?;
    snaps.write(FlowKind::Inverse, &outcome.desitter.state);
    snaps.write(FlowKind::Direct, &outcome.hyperbolic.state);
    snaps.finish()?;

    let column: Vec<Option<f64>> = outcome
        .desitter
        .rows()
        .iter()
        .map(|r| outcome.distance.iter().find(|d| d.t == r.t).map(|d| d.distance))
        .collect();
    artifacts.write(
        "diagnostics.csv",
        &diagnostics_csv(outcome.desitter.rows(), Some(("dual_distance", &column))),
    )?;
    artifacts.write("diagnostics_hyperbolic.csv", &diagnostics_csv(outcome.hyperbolic.rows(), None))?;

    outcome_summary("", &outcome.desitter, summary);
    outcome_summary("hyperbolic_", &outcome.hyperbolic, summary);
    summary.push(("max_dual_distance".into(), real(outcome.max_distance())));
    summary.push((
        "common_t".into(),
        real(outcome.distance.last().map_or(0.0, |d| d.t)),
    ));
    let code = if failed(&outcome.desitter) || failed(&outcome.hyperbolic) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    Ok(code)
}

fn run_property_suite(config: &RunConfig, artifacts: &mut Artifacts, summary: &mut Vec<(String, String)>) -> Result<i32, DriverError> {
    let f = config.curvature_function();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let report = property_suite(&f, config.samples, &mut rng);
    artifacts.write("properties.txt", &report.to_table())?;
    summary.push(("passed".into(), report.passed().to_string()));
    summary.push(("checks".into(), report.checks.len().to_string()));
    let failing: Vec<&str> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    summary.push(("failing".into(), failing.join("; ")));
    Ok(EXIT_OK)
}

fn duality_row(r: &DualityReport) -> String {
    format!(
        "{} {:.6e} {:.6e} {:.6e} {:.6e} {:.6e}\n",
        r.intervals,
        r.kappa_product,
        r.h_residual(),
        r.inner_product,
        r.graph_distance,
        r.resampling_error
    )
}

fn run_duality_check(config: &RunConfig, artifacts: &mut Artifacts, summary: &mut Vec<(String, String)>) -> Result<i32, DriverError> {
    let spec = config.initial.as_ref().expect("validated");
    let mut surfaces = vec![load_initial(config, SpaceTag::Hyperbolic)?];
    if let Some(Ok(fine)) = spec.build(SpaceTag::Hyperbolic, config.n, 2 * config.intervals) {
        surfaces.push(fine);
    }
    let mut reports = Vec::new();
    for m in &surfaces {
        reports.push(duality_report(m, &dualize(m)?)?);
    }
    let mut table = String::from("K kappa_product h_residual inner_product graph_distance resampling_error\n");
    for r in &reports {
        table.push_str(&duality_row(r));
    }
    artifacts.write("duality.txt", &table)?;
    let coarse = &reports[0];
    summary.push(("kappa_product".into(), real(coarse.kappa_product)));
    summary.push(("h_residual".into(), real(coarse.h_residual())));
    if let Some(fine) = reports.get(1) {
        summary.push(("ratio_kappa_product".into(), real(coarse.kappa_product / fine.kappa_product)));
        summary.push(("ratio_h_residual".into(), real(coarse.h_residual() / fine.h_residual())));
    }
    Ok(EXIT_OK)
}

fn run_residual_check(config: &RunConfig, artifacts: &mut Artifacts, summary: &mut Vec<(String, String)>) -> Result<i32, DriverError> {
    let spec = config.initial.as_ref().expect("validated");
    let f = config.curvature_function();
    let t_end = config.t_max.filter(|t| t.is_finite()).unwrap_or(RESIDUAL_T_END);
    let dt = config.dt.unwrap_or(RESIDUAL_DT);
    let k = config.intervals;
    let report = RefinementReport::run(
        |k| spec.build(SpaceTag::DeSitter, config.n, k).expect("closed-form initial data"),
        &f,
        t_end,
        &[(k, dt), (2 * k, dt / 2.0)],
        ResidualOptions::default(),
    )?;
    artifacts.write("residuals.txt", &report.to_table())?;
    let coarse = &report.rows[0].residuals;
    let fine = &report.rows[1].residuals;
    summary.push(("residual_chi".into(), real(coarse.chi)));
    summary.push(("residual_F".into(), real(coarse.f)));
    summary.push(("ratio_chi".into(), real(coarse.chi / fine.chi)));
    summary.push(("ratio_F".into(), real(coarse.f / fine.f)));
    summary.push(("identity".into(), real(coarse.identity.max(fine.identity))));
    Ok(EXIT_OK)
}

/// Run `config`, writing every artifact under `out_dir`.
///
/// Errors are configuration problems found only at run time (exit 2), I/O
/// failures (exit 4) or failures outside a time loop (exit 3). A step failure
/// inside a flow still writes its artifacts and returns exit code 3.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<Report, DriverError> {
    let mut artifacts = Artifacts::new(out_dir)?;
    let mut summary = vec![("preset".to_string(), config.preset.name().to_string())];
    let code = match config.preset {
        Preset::InverseDesitter | Preset::DirectHyperbolic => run_single(config, &mut artifacts, &mut summary)?,
        Preset::DualPair => run_pair(config, &mut artifacts, &mut summary)?,
        Preset::PropertySuite => run_property_suite(config, &mut artifacts, &mut summary)?,
        Preset::DualityCheck => run_duality_check(config, &mut artifacts, &mut summary)?,
        Preset::ResidualCheck => run_residual_check(config, &mut artifacts, &mut summary)?,
    };
    artifacts.write("summary.txt", &summary_text(&summary))?;
    Ok(Report {
        exit_code: code,
        summary,
        files: artifacts.files,
    })
}
