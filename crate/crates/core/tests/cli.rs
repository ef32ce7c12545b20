use std::process::{Command, Output};

use serde_json::Value;

fn nilfourier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilfourier"))
        .args(args)
        .env_remove("NILFOURIER_CACHE")
        .output()
        .unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gauss_hyperbolic_plane() {
    let o = nilfourier(&["gauss", "--p", "5", "--gram", "0,1;1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["match"], true);
    assert_eq!(
        v["gauss_sum"]["cyclotomic"].as_str().unwrap().split(' ').next(),
        Some("5")
    );
    assert_eq!(v["weil_index"]["symbolic"], "1");
}

#[test]
fn gauss_over_extension_field() {
    let o = nilfourier(&["gauss", "--p", "5", "--k", "2", "--gram", "1,0;0,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["q"], 25);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["gauss", "--p", "5", "--gram", "1,2;3,4"][..],
        &["gauss", "--p", "5", "--gram", "0,0;0,0"],
        &["gauss", "--p", "5", "--gram", "1,0;0,1", "--cap", "10"],
        &["weil", "--type", "h4", "--q", "7"],
        &["table", "--q", "9,4"],
        &["props", "--suite", "nope", "--q", "5"],
        &["verify", "--type", "sl2", "--q", "6", "--no-cache"],
        &["frobnicate"],
    ] {
        let o = nilfourier(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn weil_e7_at_seven() {
    let o = nilfourier(&["weil", "--type", "e7", "--q", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["weil_index"]["symbolic"], "-eps");
    assert_eq!(v["matches_formula"], true);
}

#[test]
fn table_mismatch_exits_one() {
    let o = nilfourier(&["table", "--q", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["mismatches"], 4);
    assert_eq!(v["degenerate"], 2);
}

#[test]
fn verify_uses_the_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = nilfourier(&["verify", "--type", "sl2", "--q", "7", "--cache", d]);
    let second = nilfourier(&["verify", "--type", "sl2", "--q", "7", "--cache", d]);
    assert_eq!(first.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&first.stderr).contains("written"));
    assert!(String::from_utf8_lossy(&second.stderr).contains("hit"));
    assert_eq!(first.stdout, second.stdout);
    let v = json(&first);
    assert_eq!(v["fc_dim"], 1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["outcome"], "pass");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nilfourier"))
        .args(["orbits", "--type", "sl2", "--q", "5"])
        .env("NILFOURIER_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    // three nilpotent orbits and one for each nonzero determinant
    assert_eq!(json(&o)["n_orbits"], 7);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn no_cache_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nilfourier"))
        .args(["orbits", "--type", "sl2", "--q", "5", "--no-cache"])
        .env("NILFOURIER_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn verify_outside_hypothesis_is_informational() {
    let o = nilfourier(&["verify", "--type", "sl2", "--q", "9", "--no-cache"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["hypothesis_ok"], false);
    assert!(v["outcome"].as_str().unwrap().starts_with("outside theorem hypothesis"));
}

#[test]
fn text_output() {
    let o = nilfourier(&["--output", "text", "props", "--suite", "sum", "--q", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("sum seed 1 q 7: 20/20 pass"));
}
