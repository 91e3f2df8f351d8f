use std::path::Path;
use std::process::{Command, Output};

fn qrelax(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrelax"))
        .args(args)
        .current_dir(dir)
        .env("QRELAX_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid json")
}

#[test]
fn randomized_commands_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["state", "random", "--m", "2"][..],
        &["abundance", "--m", "2", "--samples", "10"],
        &["survey", "--basis-sizes", "3", "--states", "1"],
    ] {
        assert_eq!(qrelax(args, dir.path()).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn state_generation_is_reproducible_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let a = ok(&qrelax(&["state", "random", "--m", "3", "--seed", "11"], dir.path()));
    let b = ok(&qrelax(&["state", "random", "--m", "3", "--seed", "11"], dir.path()));
    assert_eq!(a, b);
    let v = json(&a);
    assert_eq!(v["basis"], "angular");
    assert_eq!(v["m"], 3);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 10);
    for c in v["coefficients"].as_array().unwrap() {
        let keys: Vec<&str> = c.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, ["im", "nd", "ng", "re"]);
    }
    std::fs::write(dir.path().join("s.json"), &a).unwrap();
    let vort = json(&ok(&qrelax(&["vorticity", "s.json"], dir.path())));
    let n = vort["n"].as_i64().unwrap();
    assert!([-3, -1, 1, 3].contains(&n));
    let brute = json(&ok(&qrelax(&["vorticity", "s.json", "--method", "bruteforce"], dir.path())));
    assert_eq!(brute["n"].as_i64().unwrap(), n);
    let info = ok(&qrelax(&["state", "info", "s.json"], dir.path()));
    assert!(info.contains(&format!("total vorticity n = {n}")));
}

#[test]
fn with_vorticity_hits_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&qrelax(
        &["state", "with-vorticity", "--m", "4", "--n", "-2", "--seed", "5", "-o", "s.json"],
        dir.path(),
    ));
    assert!(out.is_empty());
    let vort = json(&ok(&qrelax(&["vorticity", "s.json"], dir.path())));
    assert_eq!(vort["n"], -2);
    let bad = qrelax(&["state", "with-vorticity", "--m", "4", "--n", "1", "--seed", "5"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn abundance_histogram_schema() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qrelax(
        &["abundance", "--m", "4", "--samples", "500", "--seed", "1", "-o", "h.json"],
        dir.path(),
    ));
    let v = json(&std::fs::read_to_string(dir.path().join("h.json")).unwrap());
    assert_eq!(v["m"], 4);
    assert_eq!(v["samples"], 500);
    let counts = v["counts"].as_object().unwrap();
    let keys: Vec<&str> = counts.keys().map(|k| k.as_str()).collect();
    for k in ["-4", "-2", "0", "2", "4"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    let total: u64 = counts.values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 500);
}

#[test]
fn normalization_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.json"),
        r#"{"basis":"cartesian","m":1,"coefficients":[{"nx":1,"ny":0,"re":0.5,"im":0.0},{"nx":0,"ny":1,"re":0.0,"im":0.4}]}"#,
    )
    .unwrap();
    assert_eq!(qrelax(&["vorticity", "s.json"], dir.path()).status.code(), Some(1));
    let v = json(&ok(&qrelax(&["vorticity", "s.json", "--renormalize"], dir.path())));
    // x + 0.8 i y winds once counterclockwise
    assert_eq!(v["n"], 1);
    assert_eq!(qrelax(&["vorticity", "missing.json"], dir.path()).status.code(), Some(1));
}

#[test]
fn drift_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qrelax(&["state", "random", "--m", "1", "--seed", "3", "-o", "s.json"], dir.path()));
    ok(&qrelax(
        &[
            "drift", "s.json", "--n-eta", "9", "--n-phi", "32", "--eta-min", "8", "--eta-max", "12",
            "-o", "f.csv",
        ],
        dir.path(),
    ));
    let csv = std::fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert!(csv.starts_with("eta,phi,d_eta,d_phi,status\n"));
    assert_eq!(csv.lines().count(), 1 + 9 * 32);
    let report = json(&ok(&qrelax(&["classify", "f.csv"], dir.path())));
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(
        keys,
        ["attractive_axes", "kind", "mechanism_aligned", "repulsive_axes", "sign_changes"]
    );
    assert_eq!(report["kind"], "Type0");
    assert_eq!(report["sign_changes"], 0);
    // probes outside the annulus are a usage error
    let out = qrelax(&["classify", "f.csv", "--probe", "30"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn node_listing_and_tracking() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qrelax(&["state", "random", "--m", "1", "--seed", "8", "-o", "s.json"], dir.path()));
    let nodes = json(&ok(&qrelax(&["nodes", "s.json", "-t", "0.5"], dir.path())));
    assert_eq!(nodes.as_array().unwrap().len(), 1);
    ok(&qrelax(
        &["nodes", "s.json", "--track", "--dt", "0.05", "-o", "tracks.csv", "--events", "ev.json"],
        dir.path(),
    ));
    let csv = std::fs::read_to_string(dir.path().join("tracks.csv")).unwrap();
    assert!(csv.starts_with("track_id,T,Qx,Qy,winding\n"));
    let ev = json(&std::fs::read_to_string(dir.path().join("ev.json")).unwrap());
    assert_eq!(ev["tracks"], 1);
    assert!(ev["events"].as_array().unwrap().is_empty());
}

#[test]
fn fine_tuned_tracking_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("s.json"),
        r#"{"basis":"angular","m":2,"coefficients":[{"nd":2,"ng":0,"re":1.0,"im":0.0}]}"#,
    )
    .unwrap();
    let out = qrelax(&["nodes", "s.json", "--track", "--t1", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn radial_drift_and_trajectory_exports() {
    let dir = tempfile::tempdir().unwrap();
    ok(&qrelax(&["state", "random", "--m", "2", "--seed", "4", "-o", "s.json"], dir.path()));
    let csv = ok(&qrelax(
        &["radial-drift", "s.json", "--trajectories", "5", "--periods", "1", "--eta", "10:20", "--seed", "7"],
        dir.path(),
    ));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eta_initial,phi_initial,eta_final,d_eta"));
    assert_eq!(lines.count(), 5);
    let traj = ok(&qrelax(&["trajectory", "s.json", "--eta", "12", "--phi", "1"], dir.path()));
    assert!(traj.starts_with("T,eta,phi,Qx,Qy\n"));
    let last: Vec<f64> = traj.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn survey_and_conjectures() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&qrelax(
        &["survey", "--basis-sizes", "3", "--states", "2", "--seed", "1", "--grid", "16", "--output-dir", "o"],
        dir.path(),
    ));
    assert!(out.contains("type0"));
    let report = json(&std::fs::read_to_string(dir.path().join("o/survey.json")).unwrap());
    assert_eq!(report["rows"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("o/survey.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    ok(&qrelax(
        &["conjectures", "--m", "1", "--states", "2", "--seed", "2", "--grid", "16", "-o", "c.json"],
        dir.path(),
    ));
    let c = json(&std::fs::read_to_string(dir.path().join("c.json")).unwrap());
    assert!(c["counterexamples"].as_array().unwrap().is_empty());
    let bad = qrelax(&["conjectures", "--m", "0", "--states", "1", "--seed", "1"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn thread_cap_must_be_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qrelax"))
        .args(["state", "random", "--m", "1", "--seed", "1"])
        .env("QRELAX_THREADS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
