//! Run configurations: flat `key = value` text, one entry per line, `#`
//! starting a comment.

use std::fmt;
use std::path::PathBuf;

use dualflow::geometry::compute_shape;
use dualflow::{CurvatureFunction, MeridianSurface, SpaceTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    InverseDesitter,
    DirectHyperbolic,
    DualPair,
    DualityCheck,
    PropertySuite,
    ResidualCheck,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::InverseDesitter,
        Preset::DirectHyperbolic,
        Preset::DualPair,
        Preset::DualityCheck,
        Preset::PropertySuite,
        Preset::ResidualCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::InverseDesitter => "inverse_desitter",
            Preset::DirectHyperbolic => "direct_hyperbolic",
            Preset::DualPair => "dual_pair",
            Preset::DualityCheck => "duality_check",
            Preset::PropertySuite => "property_suite",
            Preset::ResidualCheck => "residual_check",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// Space the initial surface lives in, if the preset takes one.
    pub fn initial_space(self) -> Option<SpaceTag> {
        match self {
            Preset::InverseDesitter | Preset::DualPair | Preset::ResidualCheck => Some(SpaceTag::DeSitter),
            Preset::DirectHyperbolic | Preset::DualityCheck => Some(SpaceTag::Hyperbolic),
            Preset::PropertySuite => None,
        }
    }

    /// Flow presets are started with `dualflow run`, the rest with `dualflow suite`.
    pub fn is_flow(self) -> bool {
        matches!(self, Preset::InverseDesitter | Preset::DirectHyperbolic | Preset::DualPair)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Slice { c: f64 },
    Perturbed { c: f64, a: f64, m: u32 },
    File(PathBuf),
}

impl InitialSpec {
    fn parse(s: &str) -> Result<Self, String> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("initial: expected slice:c, perturbed:c,a,m or file:path, got {s:?}"))?;
        let num = |t: &str, what: &str| -> Result<f64, String> {
            let x: f64 = t.trim().parse().map_err(|_| format!("initial: {what} {t:?} is not a number"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("initial: {what} must be finite"))
            }
        };
        match kind.trim() {
            "slice" => Ok(Self::Slice { c: num(rest, "c")? }),
            "perturbed" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(format!("initial: perturbed needs c,a,m, got {rest:?}"));
                }
                let m = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| format!("initial: m {:?} is not a non-negative integer", parts[2]))?;
                Ok(Self::Perturbed {
                    c: num(parts[0], "c")?,
                    a: num(parts[1], "a")?,
                    m,
                })
            }
            "file" if !rest.trim().is_empty() => Ok(Self::File(PathBuf::from(rest.trim()))),
            "file" => Err("initial: file needs a path".into()),
            other => Err(format!("initial: unknown kind {other:?}")),
        }
    }

    /// Centre value `c`, when the surface is given in closed form.
    pub fn center(&self) -> Option<f64> {
        match *self {
            Self::Slice { c } | Self::Perturbed { c, .. } => Some(c),
            Self::File(_) => None,
        }
    }

    /// Closed-form surface on `k` intervals; `None` for files.
    pub fn build(&self, space: SpaceTag, n: usize, k: usize) -> Option<Result<MeridianSurface, dualflow::GeometryError>> {
        match *self {
            Self::Slice { c } => Some(MeridianSurface::constant(space, n, k, c)),
            Self::Perturbed { c, a, m } => Some(MeridianSurface::perturbed(space, n, k, c, a, m)),
            Self::File(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub n: usize,
    /// Grid intervals `K`.
    pub intervals: usize,
    /// Name of the de Sitter curvature function; hyperbolic flows use its dual.
    pub f: String,
    pub initial: Option<InitialSpec>,
    pub t_max: Option<f64>,
    pub eps_stop: f64,
    pub c_cfl: f64,
    /// Fixed step instead of the adaptive one.
    pub dt: Option<f64>,
    pub dt_max: f64,
    pub record_interval: usize,
    /// Accepted steps between snapshots; 0 writes only the first and last.
    pub snapshot_interval: usize,
    pub output: PathBuf,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn curvature_function(&self) -> CurvatureFunction {
        CurvatureFunction::parse(&self.f, self.n).expect("validated")
    }
}

/// Every problem found in a config, in line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Largest accepted grid; finer grids need a smaller step than the
/// explicit scheme can take in reasonable time.
pub const MAX_K: usize = 1 << 16;
pub const MAX_N: usize = 1000;

const KEYS: [&str; 15] = [
    "preset",
    "n",
    "K",
    "F",
    "initial",
    "t_max",
    "eps_stop",
    "c_cfl",
    "dt",
    "dt_max",
    "record_interval",
    "snapshot_interval",
    "output",
    "seed",
    "samples",
];

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut errs = Vec::new();
    let mut entries: Vec<(usize, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(j) => &raw[..j],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            errs.push(format!("line {line_no}: expected key = value"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            errs.push(format!("line {line_no}: unknown key {key:?}"));
            continue;
        }
        if let Some((first, ..)) = entries.iter().find(|(_, k, _)| *k == key) {
            errs.push(format!("line {line_no}: {key} already set on line {first}"));
            continue;
        }
        entries.push((line_no, key, value));
    }
    let get = |key: &str| entries.iter().find(|(_, k, _)| *k == key).map(|&(l, _, v)| (l, v));

    fn number<T: std::str::FromStr>(errs: &mut Vec<String>, entry: Option<(usize, &str)>, key: &str) -> Option<T> {
        let (line, v) = entry?;
        match v.parse() {
            Ok(x) => Some(x),
            Err(_) => {
                errs.push(format!("line {line}: {key} = {v:?} is not a valid value"));
                None
            }
        }
    }
    fn real(errs: &mut Vec<String>, entry: Option<(usize, &str)>, key: &str) -> Option<f64> {
        let x: f64 = number(errs, entry, key)?;
        if x.is_finite() {
            Some(x)
        } else if key == "t_max" && x == f64::INFINITY {
            Some(x)
        } else {
            errs.push(format!("{key} must be finite"));
            None
        }
    }

    let preset = match get("preset") {
        None => {
            errs.push("missing key preset".into());
            None
        }
        Some((line, v)) => {
            let p = Preset::from_name(v);
            if p.is_none() {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                errs.push(format!("line {line}: unknown preset {v:?} (one of {})", names.join(", ")));
            }
            p
        }
    };
    let n: Option<usize> = match get("n") {
        None => {
            errs.push("missing key n".into());
            None
        }
        e => number(&mut errs, e, "n"),
    };
    let intervals: Option<usize> = number(&mut errs, get("K"), "K").or(if get("K").is_none() { Some(256) } else { None });
    let f = get("F").map(|(_, v)| v.to_string()).unwrap_or_else(|| "pm:1".to_string());
    let initial = match get("initial") {
        None => None,
        Some((line, v)) => match InitialSpec::parse(v) {
            Ok(s) => Some(s),
            Err(e) => {
                errs.push(format!("line {line}: {e}"));
                None
            }
        },
    };
    let t_max = real(&mut errs, get("t_max"), "t_max");
    let eps_stop = real(&mut errs, get("eps_stop"), "eps_stop").unwrap_or(1e-3);
    let c_cfl = real(&mut errs, get("c_cfl"), "c_cfl").unwrap_or(0.2);
    let dt = real(&mut errs, get("dt"), "dt");
    let dt_max = real(&mut errs, get("dt_max"), "dt_max").unwrap_or(1e-3);
    let record_interval: usize = number(&mut errs, get("record_interval"), "record_interval").unwrap_or(100);
    let snapshot_interval: usize = number(&mut errs, get("snapshot_interval"), "snapshot_interval").unwrap_or(record_interval);
    let output = get("output").map(|(_, v)| PathBuf::from(v)).unwrap_or_else(|| PathBuf::from("out"));
    let seed: u64 = number(&mut errs, get("seed"), "seed").unwrap_or(0);
    let samples: usize = number(&mut errs, get("samples"), "samples").unwrap_or(10_000);

    if let Some(n) = n {
        if !(2..=MAX_N).contains(&n) {
            errs.push(format!("n = {n}: need 2 <= n <= {MAX_N}"));
        }
    }
    if let Some(k) = intervals {
        if !(32..=MAX_K).contains(&k) || k % 2 != 0 {
            errs.push(format!("K = {k}: need an even K with 32 <= K <= {MAX_K}"));
        }
    }
    let n_ok = n.filter(|n| (2..=MAX_N).contains(n));
    let k_ok = intervals.filter(|k| (32..=MAX_K).contains(k) && k % 2 == 0);
    if let Some(n) = n_ok {
        if let Err(e) = CurvatureFunction::parse(&f, n) {
            errs.push(format!("F = {f:?}: {e}"));
        }
    }
    for (key, value) in [("eps_stop", Some(eps_stop)), ("c_cfl", Some(c_cfl)), ("dt", dt), ("dt_max", Some(dt_max)), ("t_max", t_max)] {
        if let Some(x) = value {
            if !(x > 0.0) {
                errs.push(format!("{key} = {x}: must be positive"));
            }
        }
    }
    if let Some(dt) = dt {
        if dt > 0.0 && dt < 1e-12 {
            errs.push(format!("dt = {dt}: below the minimum step 1e-12"));
        }
    }
    if record_interval == 0 {
        errs.push("record_interval must be at least 1".into());
    }
    if samples == 0 {
        errs.push("samples must be at least 1".into());
    }

    if let Some(preset) = preset {
        match (preset.initial_space(), &initial) {
            (Some(_), None) => errs.push(format!("preset {preset} needs an initial surface")),
            (None, Some(_)) => errs.push(format!("preset {preset} takes no initial surface")),
            (Some(space), Some(spec)) => {
                let mut sign_ok = true;
                if let Some(c) = spec.center() {
                    match space {
                        SpaceTag::DeSitter if !(c < 0.0) => {
                            errs.push(format!("initial: preset {preset} runs in de Sitter space and needs c < 0, got {c}"));
                            sign_ok = false;
                        }
                        SpaceTag::Hyperbolic if !(c > 0.0) => {
                            errs.push(format!("initial: preset {preset} runs in hyperbolic space and needs c > 0, got {c}"));
                            sign_ok = false;
                        }
                        _ => {}
                    }
                }
                if let (Some(n), Some(k), true) = (n_ok, k_ok, sign_ok) {
                    if let Some(built) = spec.build(space, n, k) {
                        if let Err(e) = built.and_then(|s| compute_shape(&s).map(|_| ())) {
                            errs.push(format!("initial: surface is not admissible: {e}"));
                        }
                    }
                }
                if matches!(spec, InitialSpec::File(_)) && preset == Preset::ResidualCheck {
                    errs.push("initial: residual_check refines the grid and needs slice or perturbed data".into());
                }
            }
            (None, None) => {}
        }
    }

    if !errs.is_empty() {
        return Err(ConfigError { violations: errs });
    }
    Ok(RunConfig {
        preset: preset.unwrap(),
        n: n.unwrap(),
        intervals: intervals.unwrap(),
        f,
        initial,
        t_max,
        eps_stop,
        c_cfl,
        dt,
        dt_max,
        record_interval,
        snapshot_interval,
        output,
        seed,
        samples,
    })
}
