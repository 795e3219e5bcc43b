//! Plain-text snapshots of a meridian surface.
//!
//! One line per grid point, columns `theta u kappa_min kappa_max v chi`,
//! space separated, 17 significant digits. Lines starting with `#` and blank
//! lines are ignored when reading.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{GeometryError, MeridianSurface, PointGeometry};
use crate::minkowski::SpaceTag;

pub const COLUMNS: [&str; 6] = ["theta", "u", "kappa_min", "kappa_max", "v", "chi"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnapshotError {
    #[error("line {line}: expected 6 columns, found {found}")]
    Columns { line: usize, found: usize },
    #[error("line {line}: cannot parse {text:?} as a number")]
    Number { line: usize, text: String },
    #[error("line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("snapshot has {0} rows, need an even number of intervals and at least 5 rows")]
    Rows(usize),
    #[error("row {row}: theta = {found} is not on the uniform grid (expected {expected})")]
    Grid { row: usize, found: f64, expected: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub theta: f64,
    pub u: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub v: f64,
    pub chi: f64,
}

impl SnapshotRow {
    pub fn from_point(p: &PointGeometry) -> Self {
        Self {
            theta: p.theta,
            u: p.u,
            kappa_min: p.kappa_min(),
            kappa_max: p.kappa_max(),
            v: p.v,
            chi: p.chi,
        }
    }

    fn values(&self) -> [f64; 6] {
        [self.theta, self.u, self.kappa_min, self.kappa_max, self.v, self.chi]
    }
}

pub fn write_snapshot(pg: &[PointGeometry]) -> String {
    let mut out = String::with_capacity(pg.len() * 6 * 24);
    for p in pg {
        let row = SnapshotRow::from_point(p).values();
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<Vec<SnapshotRow>, SnapshotError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(SnapshotError::Columns { line: line_no, found: fields.len() });
        }
        let mut v = [0.0f64; 6];
        for (slot, text) in v.iter_mut().zip(&fields) {
            *slot = text.parse().map_err(|_| SnapshotError::Number {
                line: line_no,
                text: text.to_string(),
            })?;
            if !slot.is_finite() {
                return Err(SnapshotError::NonFinite { line: line_no });
            }
        }
        rows.push(SnapshotRow {
            theta: v[0],
            u: v[1],
            kappa_min: v[2],
            kappa_max: v[3],
            v: v[4],
            chi: v[5],
        });
    }
    Ok(rows)
}

/// Surface whose graph values are the `u` column. The `theta` column must
/// be the uniform grid `kπ/K` to 1e−9.
pub fn surface_from_rows(rows: &[SnapshotRow], space: SpaceTag, n: usize) -> Result<MeridianSurface, SnapshotError> {
    if rows.len() < 5 || (rows.len() - 1) % 2 != 0 {
        return Err(SnapshotError::Rows(rows.len()));
    }
    let k = rows.len() - 1;
    for (i, r) in rows.iter().enumerate() {
        let expected = PI * i as f64 / k as f64;
        if !((r.theta - expected).abs() <= 1e-9) {
            return Err(SnapshotError::Grid {
                row: i,
                found: r.theta,
                expected,
            });
        }
    }
    Ok(MeridianSurface::new(space, n, rows.iter().map(|r| r.u).collect())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::CurvatureFunction;
    use crate::geometry::compute_geometry;

    #[test]
    fn round_trip_is_exact() {
        let s = MeridianSurface::perturbed(SpaceTag::DeSitter, 2, 32, -1.0, 0.05, 2).unwrap();
        let pg = compute_geometry(&s, &CurvatureFunction::power_mean(2.0, 2).unwrap()).unwrap();
        let text = write_snapshot(&pg);
        assert_eq!(text.lines().count(), 33);
        let rows = parse_snapshot(&text).unwrap();
        for (r, p) in rows.iter().zip(&pg) {
            assert_eq!(r.u.to_bits(), p.u.to_bits());
            assert_eq!(r.chi.to_bits(), p.chi.to_bits());
        }
        let back = surface_from_rows(&rows, SpaceTag::DeSitter, 2).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(matches!(parse_snapshot("1 2 3"), Err(SnapshotError::Columns { line: 1, found: 3 })));
        assert!(matches!(parse_snapshot("# c\n0 x 0 0 0 0"), Err(SnapshotError::Number { line: 2, .. })));
        assert!(matches!(parse_snapshot("0 inf 0 0 0 0"), Err(SnapshotError::NonFinite { line: 1 })));
    }

    #[test]
    fn rejects_off_grid_rows() {
        let mut rows: Vec<SnapshotRow> = (0..=8)
            .map(|i| SnapshotRow {
                theta: PI * i as f64 / 8.0,
                u: -1.0,
                kappa_min: 0.0,
                kappa_max: 0.0,
                v: 1.0,
                chi: 1.0,
            })
            .collect();
        assert!(surface_from_rows(&rows, SpaceTag::DeSitter, 2).is_ok());
        rows[3].theta += 1e-3;
        assert!(matches!(surface_from_rows(&rows, SpaceTag::DeSitter, 2), Err(SnapshotError::Grid { row: 3, .. })));
        assert!(matches!(surface_from_rows(&rows[..4], SpaceTag::DeSitter, 2), Err(SnapshotError::Rows(4))));
    }
}
