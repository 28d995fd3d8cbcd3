use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn resfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resfin")).args(args).current_dir(fixtures()).output().expect("spawn resfin")
}

#[test]
fn exit_codes_follow_status() {
    assert_eq!(resfin(&["compressible", "compactified_z.toml"]).status.code(), Some(0));
    assert_eq!(resfin(&["compressible", "z2_shift.toml", "--window", "2"]).status.code(), Some(1));
    assert_eq!(resfin(&["paradox", "cycle4_action.toml", "paradox_finite.toml"]).status.code(), Some(1));
}

#[test]
fn errors_exit_two() {
    let out = resfin(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage: resfin"));
    assert_eq!(resfin(&["chain-recurrence", "missing.toml"]).status.code(), Some(2));
    assert_eq!(resfin(&["chain-recurrence", "rotation8.toml"]).status.code(), Some(2));
    assert_eq!(resfin(&["chain-recurrence", "rotation8.toml", "--epsilon", "half"]).status.code(), Some(2));
}

#[test]
fn out_file_round_trips_through_check_witness() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("model.json");
    let art_s = art.to_str().unwrap();
    let run = resfin(&["chain-recurrence", "rotation8.toml", "--epsilon", "1/4", "--out", art_s]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let first = std::fs::read(&art).unwrap();
    assert_eq!(resfin(&["check-witness", "rotation8.toml", art_s]).status.code(), Some(0));
    resfin(&["chain-recurrence", "rotation8.toml", "--epsilon", "1/4", "--out", art_s]);
    assert_eq!(std::fs::read(&art).unwrap(), first);
}

#[test]
fn atom_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_resfin"))
        .args(["paradox", "fr2_boundary.toml", "paradox_boundary.toml"])
        .current_dir(fixtures())
        .env("RESFIN_CAP_ATOMS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
