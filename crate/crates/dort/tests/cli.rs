use std::fs;
use std::process::Command;

fn dort() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dort"))
}

const SCENE: &str = r#"
n_directions = 36
noise_level = 0.0
[[cavities]]
shape = "disk"
center = [1.0, 0.0]
scale = 0.05
[imaging]
x_min = -2.0
x_max = 2.0
y_min = -2.0
y_max = 2.0
step = 0.5
"#;

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scene.toml");
    fs::write(&cfg, SCENE).unwrap();
    let out = dir.path().join("out");
    let code = |args: &[&str]| dort().args(args).output().unwrap().status.code();
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());
    assert_eq!(code(&["run", "--config", c, "--out", o]), Some(0));
    assert_eq!(code(&["run", "--config", c, "--engine", "fdtd"]), Some(2));
    assert_eq!(code(&["run", "--config", c, "--aperture", "2,1"]), Some(2));
    assert_eq!(code(&["run", "--config", "/nonexistent.toml"]), Some(2));
    assert_eq!(code(&["replay", "example9"]), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "n_directions = [\n").unwrap();
    let res = dort().args(["run", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line"));
    let tiny = dir.path().join("tiny.toml");
    fs::write(&tiny, SCENE.replace("0.05", "1e-9")).unwrap();
    assert_eq!(code(&["run", "--config", tiny.to_str().unwrap(), "--out", o]), Some(3));
}

#[test]
fn simulate_then_invert_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scene.toml");
    fs::write(&cfg, SCENE).unwrap();
    let c = cfg.to_str().unwrap();
    let split = dir.path().join("split");
    let whole = dir.path().join("whole");
    let ok = |args: &[&str]| assert!(dort().args(args).status().unwrap().success(), "{args:?}");
    ok(&["simulate", "--config", c, "--out", split.to_str().unwrap(), "--noise", "0.1", "--seed", "7"]);
    assert!(split.join("operator.bin").is_file());
    ok(&["invert", "--config", c, "--out", split.to_str().unwrap()]);
    ok(&["run", "--config", c, "--out", whole.to_str().unwrap(), "--noise", "0.1", "--seed", "7"]);
    let read = |d: &std::path::Path| fs::read(d.join("eigenvalues.csv")).unwrap();
    assert_eq!(read(&split), read(&whole));
    assert_eq!(fs::read(split.join("maps/map_001.csv")).unwrap(), fs::read(whole.join("maps/map_001.csv")).unwrap());
}

#[test]
fn verify_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scene.toml");
    fs::write(&cfg, SCENE).unwrap();
    let out = dir.path().join("v");
    let res = dort().args(["verify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).output().unwrap();
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("slope"), "{stdout}");
    let table = fs::read_to_string(out.join("verify.csv")).unwrap();
    assert!(table.starts_with("name,measured,target,pass"));
}
