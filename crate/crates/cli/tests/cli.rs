use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dualflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Vec<(String, String)> {
    fs::read_to_string(dir.join("summary.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(" = ").unwrap();
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn get<'a>(s: &'a [(String, String)], key: &str) -> &'a str {
    &s.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no {key}")).1
}

#[test]
fn slice_run_reaches_stop_near_lifetime() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "preset = inverse_desitter\nn = 2\nK = 64\nF = pm:2\ninitial = slice:-1\n").unwrap();
    let out = dualflow(&["run", "run.cfg", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("res"));
    assert_eq!(get(&s, "exit_reason"), "reached_stop");
    let t: f64 = get(&s, "final_t").parse().unwrap();
    assert!((t - 1f64.cosh().ln()).abs() < 1e-3, "{t}");
    let ratio: f64 = get(&s, "max_pinch_ratio").parse().unwrap();
    assert!((ratio - 1.0).abs() < 1e-10, "{ratio}");
}

#[test]
fn invalid_config_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.cfg"),
        "preset = inverse_desitter\nn = 2\nK = 30\ninitial = slice:0.5\nspeed = 3\n",
    )
    .unwrap();
    let out = dualflow(&["run", "bad.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for needle in ["K = 30", "c < 0", "unknown key \"speed\""] {
        assert!(err.contains(needle), "missing {needle:?} in\n{err}");
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn preset_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("s.cfg"), "preset = property_suite\nn = 2\nsamples = 10\n").unwrap();
    assert_eq!(dualflow(&["run", "s.cfg"], dir.path()).status.code(), Some(2));
    assert_eq!(dualflow(&["suite", "s.cfg", "--quiet"], dir.path()).status.code(), Some(0));
}

#[test]
fn unreadable_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(dualflow(&["run", "absent.cfg"], dir.path()).status.code(), Some(4));
}

#[test]
fn step_failure_exits_3_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("f.cfg"),
        "preset = inverse_desitter\nn = 2\nK = 32\ninitial = slice:-1\ndt = 1e7\n",
    )
    .unwrap();
    let out = dualflow(&["run", "f.cfg", "--out", "res", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    let s = summary(&dir.path().join("res"));
    assert_eq!(get(&s, "exit_reason"), "step_failure");
    assert_eq!(get(&s, "steps"), "0");
    assert!(get(&s, "failure").contains("convexity lost"));
    assert!(dir.path().join("res/diagnostics.csv").exists());
}

#[test]
fn identical_configs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("d.cfg"),
        "preset = inverse_desitter\nn = 3\nK = 64\nF = pm:4\ninitial = perturbed:-1,0.1,3\nrecord_interval = 20\nseed = 11\n",
    )
    .unwrap();
    for out in ["a", "b"] {
        assert_eq!(dualflow(&["run", "d.cfg", "--out", out, "--quiet"], dir.path()).status.code(), Some(0));
    }
    let a = fs::read(dir.path().join("a/diagnostics.csv")).unwrap();
    let b = fs::read(dir.path().join("b/diagnostics.csv")).unwrap();
    assert!(a.len() > 1000);
    assert_eq!(a, b);
}

#[test]
fn dual_pair_writes_distance_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.cfg"),
        "preset = dual_pair\nn = 2\nK = 64\nF = pm:2\ninitial = perturbed:-1,0.05,2\nrecord_interval = 50\n",
    )
    .unwrap();
    let out = dualflow(&["run", "p.cfg", "--out", "res", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("res/diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",dual_distance"));
    let mut seen = 0;
    for line in lines {
        let d: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        if d.is_finite() {
            assert!(d <= 5e-3, "{d}");
            seen += 1;
        }
    }
    assert!(seen > 10);
    assert!(dir.path().join("res/diagnostics_hyperbolic.csv").exists());
}

#[test]
fn snapshot_file_restarts_a_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("a.cfg"),
        "preset = inverse_desitter\nn = 2\nK = 32\ninitial = perturbed:-1,0.05,2\nt_max = 0.05\nsnapshot_interval = 0\n",
    )
    .unwrap();
    assert_eq!(dualflow(&["run", "a.cfg", "--out", "a", "--quiet"], dir.path()).status.code(), Some(0));
    let last = fs::read_dir(dir.path().join("a/snapshots"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .max()
        .unwrap();
    fs::write(
        dir.path().join("b.cfg"),
        format!("preset = inverse_desitter\nn = 2\nK = 32\ninitial = file:{}\n", last.display()),
    )
    .unwrap();
    let out = dualflow(&["run", "b.cfg", "--out", "b", "--quiet"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("b"));
    assert_eq!(get(&s, "exit_reason"), "reached_stop");

    // wrong grid size for the file
    fs::write(
        dir.path().join("c.cfg"),
        format!("preset = inverse_desitter\nn = 2\nK = 64\ninitial = file:{}\n", last.display()),
    )
    .unwrap();
    assert_eq!(dualflow(&["run", "c.cfg", "--out", "c"], dir.path()).status.code(), Some(2));
}

#[test]
fn property_suite_flags_the_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.cfg"), "preset = property_suite\nn = 3\nF = geo\nsamples = 500\nseed = 3\n").unwrap();
    fs::write(dir.path().join("p.cfg"), "preset = property_suite\nn = 3\nF = pm:2\nsamples = 500\nseed = 3\n").unwrap();
    assert_eq!(dualflow(&["suite", "g.cfg", "--out", "g", "--quiet"], dir.path()).status.code(), Some(0));
    assert_eq!(dualflow(&["suite", "p.cfg", "--out", "p", "--quiet"], dir.path()).status.code(), Some(0));
    let g = summary(&dir.path().join("g"));
    assert_eq!(get(&g, "passed"), "false");
    assert!(get(&g, "failing").contains("sum F_i <= 1"));
    let p = summary(&dir.path().join("p"));
    assert_eq!(get(&p, "passed"), "true");
    let table = fs::read_to_string(dir.path().join("p/properties.txt")).unwrap();
    assert!(table.lines().skip(2).all(|l| l.ends_with("pass")));
}

#[test]
fn residual_and_duality_suites_report_second_order() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("r.cfg"),
        "preset = residual_check\nn = 2\nK = 64\ninitial = perturbed:-1,0.05,2\n",
    )
    .unwrap();
    fs::write(
        dir.path().join("d.cfg"),
        "preset = duality_check\nn = 2\nK = 64\ninitial = perturbed:1,0.05,2\n",
    )
    .unwrap();
    assert_eq!(dualflow(&["suite", "r.cfg", "--out", "r", "--quiet"], dir.path()).status.code(), Some(0));
    assert_eq!(dualflow(&["suite", "d.cfg", "--out", "d", "--quiet"], dir.path()).status.code(), Some(0));
    let r = summary(&dir.path().join("r"));
    for key in ["ratio_chi", "ratio_F"] {
        let x: f64 = get(&r, key).parse().unwrap();
        assert!((3.0..=5.0).contains(&x), "{key} = {x}");
    }
    let d = summary(&dir.path().join("d"));
    for key in ["ratio_kappa_product", "ratio_h_residual"] {
        let x: f64 = get(&d, key).parse().unwrap();
        assert!((3.0..=5.0).contains(&x), "{key} = {x}");
    }
}
