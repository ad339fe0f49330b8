use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qdynmaps(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdynmaps"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn data_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn headers_echo_config_and_conventions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("feasible.conf");
    let out = qdynmaps(&["converge", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("converge.csv")).unwrap();
    assert!(text.starts_with(&format!("# qdynmaps {} (converge)", qdynmaps::VERSION)));
    assert!(text.contains("natural log"));
    assert!(text.contains("exp(-i H t)"));
    assert!(text.contains("# config: rG=-0.2\n"));
    assert!(text.contains("# config: h=0.7853981633974483\n"));
    assert!(text.contains("\nmap,steps,converged\n"));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("map_pc.conf");
    let out = qdynmaps(
        &["map", "--config", cfg.to_str().unwrap(), "--b3", "-0.4", "--rG", "-0.4"],
        dir.path(),
    );
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("map.json")).unwrap()).unwrap();
    assert_eq!(json["meta"]["config"]["b3"], "-0.4");
    assert_eq!(json["meta"]["config"]["construction"], "pc");
    let fp = json["fixed_point"]["bloch"][2].as_f64().unwrap();
    assert!((fp + 0.4).abs() < 1e-12);
    assert_eq!(json["gibbs_preserving_for_rG"], true);
}

#[test]
fn map_classifications() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdynmaps(
        &[
            "map",
            "--construction",
            "pc",
            "--J",
            "0.5",
            "--h",
            "pi/4",
            "--b3",
            "0.3",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("map.json")).unwrap()).unwrap();
    assert_eq!(json["classification"]["phase_covariant"], true);
    assert_eq!(json["classification"]["cptp"], true);
    assert!(json["choi_min_eigenvalue"].as_f64().unwrap() >= 0.0);
    assert_eq!(data_rows(&dir.path().join("map.csv")).len(), 4);

    let out = qdynmaps(
        &[
            "map",
            "--construction",
            "gp_3qubit",
            "--b3",
            "0.3",
            "--rG",
            "-0.3",
            "--f1",
            "0.2",
            "--f2",
            "0.1",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("map.json")).unwrap()).unwrap();
    let class = &json["classification"];
    assert_eq!(class["cptp"], true);
    assert_eq!(class["phase_covariant"], false);
    assert!((class["gibbs_preserving_for"].as_f64().unwrap() + 0.3).abs() < 1e-10);
    assert_eq!(json["solution"]["feasible"], true);
}

#[test]
fn identity_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdynmaps(&["map", "--J", "0", "--h", "0", "--t", "2.5"], dir.path());
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("map.csv"));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert_eq!(v.parse::<f64>().unwrap(), expected);
        }
    }
}

#[test]
fn infeasible_sweep_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sweep");
    let out = qdynmaps(&["sweep-deltaD", "--b3", "0.3", "--rG", "0.45"], &target);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sign_conflict"));
    assert!(!target.exists());

    let out = qdynmaps(&["solve-gp", "--b3", "0.3", "--rG", "0.45"], &target);
    assert_eq!(out.status.code(), Some(2));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(target.join("solve_gp.json")).unwrap()).unwrap();
    assert_eq!(json["solution"]["infeasibility"], "sign_conflict");
    assert!(json["solution"]["j"].is_null());
}

#[test]
fn invalid_configs_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["map", "--b3", "1.5"][..],
        &["map", "--construction", "thermal"],
        &["map", "--set", "nonsense=1"],
        &["map", "--J", "pi pi"],
        &["verify", "--claim", "bogus"],
        &["map", "--config", "/nonexistent/file.conf"],
        &["map", "--no-such-flag"],
        &["sweep-deltaD", "--set", "sweep_points=0"],
    ] {
        let out = qdynmaps(args, dir.path());
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
    let out = qdynmaps(&["verify", "--claim", "bogus"], dir.path());
    let err = String::from_utf8_lossy(&out.stderr);
    for id in ["charge_conservation", "no_coherence", "even_charge_pc", "hierarchy"] {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn sweep_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdynmaps(&["sweep-deltaD", "--set", "sweep_points=21"], dir.path());
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("sweep_deltaD.csv"));
    let vals: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(vals.first().unwrap()[0], -1.0);
    assert_eq!(vals.last().unwrap()[0], 1.0);
    let gibbs = vals.iter().find(|r| r[0] == -0.2).expect("rG row present");
    assert!(gibbs[1] < 1e-10 && gibbs[3] < 1e-10);
    for r in &vals {
        assert!((r[4] - (r[3] - r[1])).abs() < 1e-15);
    }
    assert!(vals.iter().any(|r| r[4] > 0.0));
}

#[test]
fn trajectories_and_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdynmaps(
        &["trajectories", "--set", "steps=0", "--set", "cloud_points=10"],
        dir.path(),
    );
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("trajectories.csv"));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[1] == "0" && r[4].parse::<f64>().unwrap() == 1.0));
    assert_eq!(data_rows(&dir.path().join("cloud.csv")).len(), 30);

    let out = qdynmaps(&["trajectories"], dir.path());
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("trajectories.csv"));
    assert!(rows
        .iter()
        .filter(|r| r[0] == "PC")
        .all(|r| r[5].parse::<f64>().unwrap() == 0.0));
    assert!(rows
        .iter()
        .filter(|r| r[0] == "GP")
        .any(|r| r[5].parse::<f64>().unwrap() > 1e-3));

    let out = qdynmaps(&["converge", "--set", "n_max=3"], dir.path());
    assert!(out.status.success());
    let rows = data_rows(&dir.path().join("converge.csv"));
    assert!(rows.iter().any(|r| r[2] == "false"));
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdynmaps(
        &["verify", "--claim", "no_coherence", "--n", "3", "--trials", "30"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("verify.jsonl")).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0]["meta"].is_object());
    assert_eq!(lines[1]["claim_id"], "no_coherence");
    assert_eq!(lines[1]["passed"], true);
    assert_eq!(lines[1]["n_qubits"], 3);

    let out = qdynmaps(&["verify", "--trials", "20"], dir.path());
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("verify.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 5);
}
