use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_skt-lab");

const SMALL: &str = "\
grid.cells_x = 128
model.c1 = 0.1
model.c2 = 0.1
model.a1 = 0.5
model.a2 = 0.5
model.t_final = 0.01
initial.kind = gaussian
initial.u1.background = 0.2
initial.u1.amplitudes = 1
initial.u1.centers_x = 0.4
initial.u1.widths = 0.1
initial.u2.background = 0.3
initial.u2.amplitudes = 0.5
initial.u2.centers_x = 0.6
initial.u2.widths = 0.1
study.n_list = 4, 8, 16
study.n = 4
solver.snapshots = 5
";

fn run(cmd: &str, config: &str, dir: &Path) -> (i32, String) {
    let cfg = dir.join("run.conf");
    fs::write(&cfg, config).unwrap();
    let out = Command::new(BIN)
        .args([cmd, "--config", cfg.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap(), "--jobs", "2"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap(), text)
}

#[test]
fn every_subcommand_succeeds_on_a_small_case() {
    for (cmd, files) in [
        ("simulate-nonlocal", vec!["diagnostics.csv", "snapshots/u1_0004.txt"]),
        ("simulate-local", vec!["diagnostics.csv", "snapshots/u2_0000.txt"]),
        ("dual-solve", vec!["iterations.csv", "phi/phi_0000.txt"]),
        ("consistency-test", vec!["consistency.csv"]),
        ("lemma4-audit", vec!["lemma4.csv"]),
        ("convergence-study", vec!["convergence.csv"]),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let (code, text) = run(cmd, SMALL, dir.path());
        assert_eq!(code, 0, "{cmd}: {text}");
        let out = dir.path().join("out");
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(report["command"], cmd);
        for f in files {
            assert!(out.join(f).exists(), "{cmd}: missing {f}");
        }
    }
}

#[test]
fn convergence_csv_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run("convergence-study", SMALL, dir.path());
    assert_eq!(code, 0);
    let csv = fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    assert!(csv.starts_with("n,e1,e2,e_total,rate\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run("simulate-local", &SMALL.replace("model.a1 = 0.5\n", ""), dir.path());
    assert_eq!(code, 3);
    assert!(text.contains("model.a1"), "{text}");
    let (code, text) = run("simulate-local", &format!("{SMALL}model.zeta = 1\n"), dir.path());
    assert_eq!(code, 3);
    assert!(text.contains("model.zeta") && text.contains("line 19"), "{text}");
}

#[test]
fn solver_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run("dual-solve", &format!("{SMALL}dual.max_iters = 1\n"), dir.path());
    assert_eq!(code, 2, "{text}");
}

#[test]
fn failed_checks_exit_with_four() {
    // Four cells per kernel radius make the audited operator too coarse for
    // the ratios to stay within the allowed spread.
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{}kernel.min_cells_per_radius = 1\nstudy.n_list = 1, 32\n",
        SMALL.replace("study.n_list = 4, 8, 16\n", "")
    );
    let (code, text) = run("lemma4-audit", &cfg, dir.path());
    assert_eq!(code, 4, "{text}");
}
