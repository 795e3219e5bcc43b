//! Replays the checked-in fuzz seeds through the fuzzed entry points.

use std::fs;
use std::path::PathBuf;

use dualflow::snapshot::{parse_snapshot, surface_from_rows};
use dualflow::{CurvatureFunction, SpaceTag};
use dualflow_cli::parse_config;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    assert!(!out.is_empty());
    out.sort();
    out
}

#[test]
fn config_seeds() {
    let results: Vec<_> = seeds("parse_config")
        .iter()
        .map(|s| parse_config(std::str::from_utf8(s).unwrap()))
        .collect();
    assert!(results.iter().any(|r| r.is_ok()));
    for r in results.iter().filter_map(|r| r.as_ref().err()) {
        assert!(!r.violations.is_empty());
    }
}

#[test]
fn snapshot_seeds() {
    let mut surfaces = 0;
    for s in seeds("parse_snapshot") {
        if let Ok(rows) = parse_snapshot(std::str::from_utf8(&s).unwrap()) {
            surfaces += surface_from_rows(&rows, SpaceTag::DeSitter, 2).is_ok() as usize;
        }
    }
    assert_eq!(surfaces, 1);
}

#[test]
fn curvature_name_seeds() {
    let mut parsed = 0;
    for s in seeds("curvature_name") {
        let n = 1 + s[0] as usize % 8;
        if let Ok(f) = CurvatureFunction::parse(std::str::from_utf8(&s[1..]).unwrap(), n) {
            assert!((f.eval(&vec![1.0; n]).unwrap() - 1.0).abs() < 1e-14);
            parsed += 1;
        }
    }
    assert_eq!(parsed, 4);
}
