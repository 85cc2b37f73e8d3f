use std::fs;
use std::process::Command;

use hwlod_cli::{ProblemKind, RunConfig};

fn hwlod() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hwlod"));
    c.env_remove("HWLOD_OUT_DIR");
    c
}

#[test]
fn run_writes_the_final_field_and_reports_positivity() {
    let dir = tempfile::tempdir().unwrap();
    let out = hwlod()
        .args([
            "run",
            "--problem",
            "tp1",
            "--n",
            "16",
            "--m",
            "16",
            "--k",
            "32",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("nonnegative"), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("final_field.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,x,y,value"));
    assert_eq!(csv.lines().count(), 1 + 17 * 17);
    let row: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[..2], ["1", "0"]);
    assert_eq!(row[2], "6.2500000000000000e0");
    assert!(dir.path().join("diagnostics.csv").exists());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let st = hwlod()
            .args([
                "run",
                "--problem",
                "tp2",
                "--n",
                "12",
                "--m",
                "10",
                "--k",
                "8",
                "--snapshots",
                "0,4",
                "--boundaries",
                "--out",
            ])
            .arg(d.path())
            .output()
            .unwrap();
        assert!(st.status.success());
    }
    for name in [
        "final_field.csv",
        "snapshot_00000.csv",
        "snapshot_00004.csv",
        "boundaries.csv",
        "diagnostics.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn printed_config_parses_back_to_the_same_config() {
    let out = hwlod()
        .args([
            "run",
            "--problem",
            "tp2",
            "--n",
            "40",
            "--k",
            "7",
            "--zeta",
            "0.02",
            "--print-config",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = RunConfig::from_json(&text).unwrap();
    assert_eq!(cfg.problem, ProblemKind::Tp2);
    assert_eq!(cfg.steps, 7);
    assert_eq!(cfg.domain.unwrap().zeta, 0.02);
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, &text).unwrap();
    let again = hwlod()
        .args(["run", "--print-config", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(
        RunConfig::from_json(&String::from_utf8(again.stdout).unwrap()).unwrap(),
        cfg
    );
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(&path, RunConfig::preset(ProblemKind::Tp3).to_json()).unwrap();
    let out = hwlod()
        .args(["run", "--k", "3", "--print-config", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    let cfg = RunConfig::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!((cfg.problem, cfg.steps), (ProblemKind::Tp3, 3));
}

#[test]
fn invalid_config_exits_nonzero_with_the_field_name() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let mut cfg = RunConfig::preset(ProblemKind::Tp2);
    cfg.cash = None;
    cfg.out_dir = dir.path().join("out");
    fs::write(&path, cfg.to_json()).unwrap();
    let out = hwlod()
        .args(["run", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cash"), "{err}");
    assert!(!dir.path().join("out").exists());

    fs::write(&path, "{\"problem\": \"tp1\"}").unwrap();
    let out = hwlod()
        .args(["run", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("x_axis"));
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let st = hwlod()
        .env("HWLOD_OUT_DIR", dir.path())
        .args([
            "boundary",
            "--problem",
            "tp1",
            "--n",
            "8",
            "--m",
            "4",
            "--k",
            "2",
        ])
        .output()
        .unwrap();
    assert!(st.status.success());
    let csv = fs::read_to_string(dir.path().join("boundaries.csv")).unwrap();
    assert!(csv.starts_with("edge,k,t,index,coordinate,value\n"));
}

#[test]
fn mesh_command_reproduces_the_graded_axis() {
    let out = hwlod()
        .args([
            "mesh",
            "--spec",
            "sinh-origin",
            "--n",
            "512",
            "--d-div",
            "700",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 513);
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "512");
    assert_eq!(last[1].parse::<f64>().unwrap(), 100.0);
    let bad = hwlod()
        .args(["mesh", "--spec", "sinh-origin", "--n", "0"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn compare_1d_writes_both_slices() {
    let dir = tempfile::tempdir().unwrap();
    let st = hwlod()
        .args([
            "compare-1d",
            "--problem",
            "tp1",
            "--sigma",
            "0.71",
            "--n",
            "16",
            "--m",
            "16",
            "--k",
            "16",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(st.status.success());
    let csv = fs::read_to_string(dir.path().join("compare_1d.csv")).unwrap();
    assert!(csv.starts_with("i,x,y,value_2d,value_1d\n"));
    assert_eq!(csv.lines().count(), 18);
    let out_of_range = hwlod()
        .args(["compare-1d", "--problem", "tp1", "--sigma", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out_of_range.status.success());
}

#[test]
fn unknown_table_id_is_rejected() {
    let out = hwlod().args(["table", "--id", "t9"]).output().unwrap();
    assert!(!out.status.success());
}
