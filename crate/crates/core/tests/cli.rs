use std::path::Path;
use std::process::{Command, Output};

fn story(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_story")).args(args).output().expect("binary runs")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let out = story(&[&["generate"], args].concat());
    assert!(out.status.success());
    let path = dir.join(name);
    std::fs::write(&path, out.stdout).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn check_reports_unrealizable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let sp = generate(dir.path(), "sp.json", &["sp-unrealizable", "--omega", "5"]);
    assert_eq!(story(&["check", &sp]).status.code(), Some(1));
    let path = generate(dir.path(), "path.json", &["path", "--n", "9", "--omega", "4"]);
    let out = story(&["check", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["realizable"], true);
}

#[test]
fn min_k_on_flags_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let flags = generate(dir.path(), "flags.json", &["flags", "--omega", "8"]);
    let out = story(&["min-k", "--max", "3", &flags]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1");
}

#[test]
fn solve_verify_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate(dir.path(), "r.json", &["random", "--n", "9", "--omega", "4", "--k", "1", "--seed", "3"]);
    let cert = dir.path().join("cert.json");
    let out = story(&["solve", &s, "--out", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(story(&["verify", cert.to_str().unwrap()]).status.code(), Some(0));

    let frames = dir.path().join("frames");
    let out = story(&["render", cert.to_str().unwrap(), "--out", frames.to_str().unwrap(), "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for i in 1..=9 {
        assert!(frames.join(format!("frame_{i}.svg")).exists());
    }
    assert!(std::fs::read_to_string(frames.join("index.html")).unwrap().contains("frame_9.svg"));

    let pts = dir.path().join("points.json");
    std::fs::write(&pts, r#"[[0,0],[10,1],[3,7],["1/2",4],[8,9]]"#).unwrap();
    let out = story(&["render", cert.to_str().unwrap(), "--out", frames.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::write(&pts, r#"[[0,0],[10,1]]"#).unwrap();
    let out = story(&["render", cert.to_str().unwrap(), "--out", frames.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate(dir.path(), "p.json", &["path", "--n", "7", "--omega", "3"]);
    let out = story(&["solve", &s]);
    let mut cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    cert["embeddings"][2]["weights"][0] = 1.into();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let out = story(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("invalid:"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 3, "omega": 5, "k": 0, "edges": []}"#).unwrap();
    assert_eq!(story(&["check", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(story(&["check", "/nonexistent/story.json"]).status.code(), Some(2));
}

#[test]
fn bound_exceeded_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let s = generate(dir.path(), "r.json", &["random", "--n", "12", "--omega", "5", "--k", "1", "--p", "0.7"]);
    assert_eq!(story(&["check", &s, "--max-layer", "1"]).status.code(), Some(3));
}

#[test]
fn reroute_pipeline_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let sp = generate(dir.path(), "sp.json", &["sp-unrealizable", "--omega", "5"]);
    let frames = dir.path().join("frames");
    let out = story(&["reroute1", &sp, "--out", frames.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("reroute edge"));
    assert!(frames.join("frame_8.svg").exists());

    let out = story(&["bench", "--sizes", "10,20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,omega,k,realizable,max_layer,seconds");
    assert!(rows[1].starts_with("10,5,0,true,") && rows[2].starts_with("20,5,0,true,"));
}

#[test]
fn supporting_and_sunflower_generation() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "p.json", &["path", "--n", "6", "--omega", "3"]);
    assert_eq!(story(&["supporting", &path]).status.code(), Some(0));
    let out = story(&["generate", "sunflower", "--n", "4", "--seed", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["n"].as_u64().unwrap() > 0);
}
