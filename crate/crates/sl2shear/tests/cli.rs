//! End-to-end checks of the command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sl2shear"))
}

#[test]
fn dist_single_shear() {
    let out = bin()
        .args(["dist", "--matrix", "1,1,0,1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("cost 1.0000000000000000e0"), "{text}");
    assert!(text.contains("(P, 1.000000)"));
}

#[test]
fn dist_quarter_rotation() {
    let out = bin()
        .args(["dist", "--matrix", "0,1,-1,0", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"cost\":3.0000000000000000e0"), "{text}");
    assert!(text.contains("\"control\":\"P\""));
    assert!(text.contains("\"control\":\"-Q\""));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let run = || {
        bin()
            .args(["dist", "--matrix", "0.9,0.7,-0.4,0.8", "--group", "psl2", "--json"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn malformed_input_exits_two() {
    let out = bin().args(["dist", "--matrix", "1,2,3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // non-unimodular matrix
    let out = bin().args(["dist", "--matrix", "2,0,0,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown verify suite
    let out = bin()
        .args(["verify", "--suite", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_identities_passes() {
    let out = bin()
        .args(["verify", "--suite", "identities", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn twoslip_reports_mu_and_distance() {
    let out = bin()
        .args([
            "twoslip", "--s1", "0,1,1", "--s2", "0,-1.5,1.5", "--matrix", "0,1,-1,0", "--json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // S1 = 2P, S2 = -3Q in (h,t,u) coordinates: mu = sqrt6
    assert!(text.contains("\"mu\":2.4494897427831"), "{text}");
    assert!(text.contains("\"lambda\":"));
    assert!(text.contains("\"distance\":"));
}

#[test]
fn sphere_and_path_write_files() {
    let dir = std::env::temp_dir();
    let obj = dir.join("sl2shear_test_sphere.obj");
    let csv = dir.join("sl2shear_test_path.csv");
    let out = bin()
        .args([
            "sphere",
            "--cost",
            "1.0",
            "--res",
            "6",
            "--out",
            obj.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&obj).unwrap();
    assert!(text.contains("# patch A3"));
    assert!(text.lines().any(|l| l.starts_with("v ")));
    assert!(text.lines().any(|l| l.starts_with("f ")));

    let out = bin()
        .args([
            "path",
            "--matrix",
            "0,1,-1,0",
            "--step",
            "0.05",
            "--out",
            csv.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().count() > 10);
    assert!(text.lines().all(|l| l.split(',').count() == 5));

    std::fs::remove_file(obj).ok();
    std::fs::remove_file(csv).ok();
}
