use std::path::PathBuf;

use assert_cmd::Command;

fn qcm() -> Command {
    Command::cargo_bin("qcm").unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name]
        .iter()
        .collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn stdout_of(args: &[&str]) -> String {
    let out = qcm().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn golden_check_report() {
    assert_eq!(
        stdout_of(&["check", "--trials", "200", "--seed", "42"]),
        golden("check_trials200_seed42.csv")
    );
}

#[test]
fn golden_wstate() {
    assert_eq!(stdout_of(&["wstate"]), golden("wstate.csv"));
}

#[test]
fn golden_anticlone() {
    assert_eq!(stdout_of(&["anticlone"]), golden("anticlone.csv"));
}

#[test]
fn golden_decoherence() {
    assert_eq!(stdout_of(&["decoherence"]), golden("decoherence.csv"));
}

#[test]
fn golden_scan() {
    assert_eq!(stdout_of(&["scan", "--m", "9"]), golden("scan_m9.csv"));
}

#[test]
fn headers_are_fixed() {
    let cases: [(&[&str], &str); 5] = [
        (
            &["check", "--trials", "1"],
            "suite,trials,max_deviation,tolerance,status",
        ),
        (
            &["wstate", "--m", "3"],
            "M,scheme,r,tau_star,a1,a,classification",
        ),
        (
            &["anticlone", "--m", "3"],
            "M,F_iden,F_plusminus,F_sep,F1_iden,F1_plus,F1_minus,F1_sep,identity_residual",
        ),
        (
            &["decoherence", "--m", "3"],
            "M,scheme,r,tau_c,F_r,P_no_click",
        ),
        (
            &["scan", "--r-grid", "1:2:2"],
            "kind,r,a1,a,F_target,F_input",
        ),
    ];
    for (args, header) in cases {
        assert_eq!(stdout_of(args).lines().next(), Some(header), "{args:?}");
    }
}

#[test]
fn check_is_deterministic_per_seed() {
    let a = stdout_of(&["check", "--trials", "25", "--seed", "7"]);
    let b = stdout_of(&["check", "--trials", "25", "--seed", "7"]);
    let c = stdout_of(&["check", "--trials", "25", "--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn zero_trials_gives_empty_report() {
    assert_eq!(
        stdout_of(&["check", "--trials", "0"]),
        "suite,trials,max_deviation,tolerance,status\n"
    );
}

#[test]
fn injected_sign_flip_breaches_unitarity() {
    let out = qcm()
        .args(["check", "--trials", "10", "--inject-sign-flip"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unitarity"));
}

#[test]
fn configuration_errors_exit_2() {
    let bad: [&[&str]; 8] = [
        &["wstate", "--m", "1"],
        &["wstate", "--m-range", "5:3"],
        &["scan", "--r-grid", "1:2:0"],
        &["anticlone", "--m", "3", "--m-odd", "2"],
        &["decoherence", "--m", "3", "--kappa", "-1"],
        &["wstate", "--m", "3", "--format", "xml"],
        &["wstate", "--m", "3", "--scheme", "w_plus", "--r", "2"],
        &[
            "decoherence",
            "--m",
            "2",
            "--gamma-decay",
            "0",
            "--kappa",
            "10",
            "--scheme",
            "w_plus",
        ],
    ];
    for args in bad {
        let code = qcm().args(args).output().unwrap().status.code();
        assert_eq!(code, Some(2), "{args:?}");
    }
}

#[test]
fn json_mirrors_csv_columns() {
    let json = stdout_of(&[
        "wstate", "--m", "4", "--scheme", "w_plus", "--format", "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    let row = &rows.as_array().unwrap()[0];
    let keys: Vec<&str> = row
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    assert_eq!(
        keys,
        ["M", "scheme", "r", "tau_star", "a1", "a", "classification"]
    );
    assert_eq!(row["r"], 3.0);
    assert_eq!(row["classification"], "symmetric_W");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qcm-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.csv");
    qcm()
        .args(["wstate", "--m", "3", "--out", path.to_str().unwrap()])
        .assert()
        .success()
        .stdout("");
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        stdout_of(&["wstate", "--m", "3"])
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_file_is_merged_and_cli_wins() {
    let dir = std::env::temp_dir().join(format!("qcm-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.cfg");
    std::fs::write(&path, "# sweep\nm-range = 2:3\nscheme = w_prime\n").unwrap();
    let cfg = path.to_str().unwrap();

    let from_file = stdout_of(&["wstate", "--config", cfg]);
    assert_eq!(
        from_file,
        stdout_of(&["wstate", "--m-range", "2:3", "--scheme", "w_prime"])
    );
    let overridden = stdout_of(&["wstate", "--config", cfg, "--scheme", "w_plus"]);
    assert_eq!(
        overridden,
        stdout_of(&["wstate", "--m-range", "2:3", "--scheme", "w_plus"])
    );

    std::fs::write(&path, "bogus = 1\n").unwrap();
    let code = qcm()
        .args(["wstate", "--config", cfg])
        .output()
        .unwrap()
        .status
        .code();
    assert_eq!(code, Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
