//! Byte-level regression of the CSV tables. Regenerate with
//! `QFLAT_UPDATE_GOLDEN=1 cargo test -p qflat --test golden`.

use std::path::PathBuf;
use std::process::Command;

fn check(name: &str, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_qflat"))
        .args(args)
        .output()
        .expect("spawn qflat");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("QFLAT_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        expected == out.stdout,
        "{name} differs from golden:\n--- expected\n{}\n--- actual\n{}",
        String::from_utf8_lossy(&expected),
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn qtable_columns_and_values() {
    check("qtable.csv", &["qtable", "--space", "S3,S2,CP2", "--n", "0..2", "--tau", "0.25,1,4"]);
}

#[test]
fn curvature_columns_and_values() {
    check("curvature.csv", &["curvature", "--space", "S3,S4,HP2", "--n-max", "2", "--tau", "0.5,1,2"]);
}

#[test]
fn literal_curvature() {
    check("curvature_literal.csv", &["curvature", "--space", "S3", "--n-max", "1", "--tau", "1", "--mode", "literal"]);
}

#[test]
fn scan_summary() {
    check("scan.csv", &["scan", "--format", "csv"]);
}

#[test]
fn centrality_table() {
    check("centrality.csv", &["centrality", "--space", "S2,S3,CP2", "--n", "1..3", "--format", "csv"]);
}
