use std::path::PathBuf;
use std::process::{Command, Output};

fn fqgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqgeom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fqgeom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn audit_incidence_emits_json_lines() {
    let o = fqgeom(&["audit", "incidence", "--theorem", "T2.4", "--q", "7", "--seed", "1", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["theorem"], "T2.4");
        assert_eq!(v["q"], 7);
    }
}

#[test]
fn output_is_independent_of_workers() {
    let run = |w: &str| stdout(&fqgeom(&["--workers", w, "audit", "fur", "--q", "7", "--trials", "20"]));
    assert_eq!(run("1"), run("3"));
}

#[test]
fn census_full_plane_csv() {
    let o = fqgeom(&["census", "--q", "3", "--k", "2", "--set", "full-plane"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,multiplicity"));
    let total: u64 = lines
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 729);
}

#[test]
fn census_from_file() {
    let path = tmp("points.txt");
    std::fs::write(&path, "# three points\n[0,0]\n[1,0]\n[0,1]\n").unwrap();
    let o = fqgeom(&["census", "--q", "7", "--k", "1", "--set", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let sum: u64 = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["multiplicity"].as_u64().unwrap())
        .sum();
    assert_eq!(sum, 9);
}

#[test]
fn usage_errors_exit_2_and_name_the_field() {
    let o = fqgeom(&["field", "--q", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--q"));
    let o = fqgeom(&["audit", "incidence", "--theorem", "T9.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--theorem"));
    assert_eq!(fqgeom(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(fqgeom(&["sharpness", "sec3", "--p", "3", "--k", "5"]).status.code(), Some(2));
}

#[test]
fn tight_ceilings_are_regressions() {
    let committed = include_str!("../../core/data/ceilings.txt");
    let tight: String = committed
        .lines()
        .map(|l| {
            if l.starts_with("T2.4 ") {
                "T2.4 0.000001 0.000001 1 1".to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = tmp("tight.txt");
    std::fs::write(&path, tight).unwrap();
    let args = ["audit", "incidence", "--theorem", "T2.4", "--q", "7", "--trials", "30"];
    let o = fqgeom(&[&args[..], &["--ceilings", path.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"regression\""));
    assert_eq!(fqgeom(&args).status.code(), Some(0));
}

#[test]
fn manifest_round_trip() {
    let args = ["audit", "moment", "--q", "7", "--seed", "4", "--trials", "10", "--format", "csv"];
    let emitted = fqgeom(&[&["--emit-manifest"], &args[..]].concat());
    assert_eq!(emitted.status.code(), Some(0));
    let path = tmp("moment.json");
    std::fs::write(&path, stdout(&emitted)).unwrap();
    let direct = fqgeom(&args);
    let replay = fqgeom(&["--manifest", path.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(stdout(&direct), stdout(&replay));
    assert!(stdout(&direct).starts_with("theorem,q,d,"));
}

#[test]
fn recipe_replay_matches_subcommand() {
    let path = tmp("recipe.json");
    std::fs::write(&path, r#"{"kind":"fur1_strip","p":7,"r":1,"d":2,"X":[0,1,2]}"#).unwrap();
    let replay = fqgeom(&["--manifest", path.to_str().unwrap()]);
    let direct = fqgeom(&["sharpness", "fur1", "--q", "7", "--x", "0,1,2"]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(stdout(&replay), stdout(&direct));
    let v: serde_json::Value = serde_json::from_str(stdout(&direct).trim()).unwrap();
    assert_eq!(v["result"]["instance"]["motions"].as_array().unwrap().len(), 42);
}

#[test]
fn sec3_replay() {
    let o = fqgeom(&["sharpness", "sec3", "--p", "3", "--k", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["result"]["a"].as_array().unwrap().len(), 7);
    assert_eq!(v["checks"]["size_identity"], true);
}

#[test]
fn mu_table_agrees() {
    let o = fqgeom(&["mu-table", "--q", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6 * 49);
}

#[test]
fn small_calibration_writes_replayable_file() {
    let out = tmp("ceil.txt");
    let o = fqgeom(&["calibrate", "--qs", "3", "--trials", "5", "--seed", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# fqgeom ceilings v1\n"));
    let replay = fqgeom(&["--manifest", out.to_str().unwrap()]);
    assert_eq!(stdout(&replay), text);
    let check = fqgeom(&["calibrate", "--qs", "3", "--trials", "5", "--seed", "2", "--check", "--ceilings", out.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    let other = fqgeom(&["calibrate", "--qs", "3", "--trials", "5", "--seed", "3", "--check", "--ceilings", out.to_str().unwrap()]);
    assert_eq!(other.status.code(), Some(1));
}

#[test]
fn field_and_group_summaries() {
    let f: serde_json::Value = serde_json::from_str(stdout(&fqgeom(&["field", "--q", "27"])).trim()).unwrap();
    assert_eq!((f["p"].as_u64(), f["r"].as_u64()), (Some(3), Some(3)));
    let g: serde_json::Value = serde_json::from_str(stdout(&fqgeom(&["group", "--q", "3"])).trim()).unwrap();
    assert_eq!(g["orthogonal_order"], 8);
    assert_eq!(g["class_size"], 72);
    let lines = stdout(&fqgeom(&["group", "--q", "3", "--class", "sf-prime", "--list"]));
    assert_eq!(lines.lines().count(), 27);
}

#[test]
fn emitted_manifest_drops_transient_flags() {
    let o = fqgeom(&["--emit-manifest", "--workers", "3", "--force", "audit", "incidence", "--q", "7", "--format", "csv"]);
    let m: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(m["command"], "audit incidence");
    assert_eq!(m["field"], serde_json::json!({"p": 7, "r": 1}));
    assert_eq!(m["params"]["force"], "true");
    assert!(m["params"].get("workers").is_none());
    assert_eq!(m["output"]["format"], "csv");
}

#[test]
fn recipes_become_commands() {
    let path = tmp("sec3.json");
    std::fs::write(&path, r#"{"kind":"sec3_cyclic","p":3,"r":3,"k":7,"X":[]}"#).unwrap();
    let o = fqgeom(&["--manifest", path.to_str().unwrap(), "--emit-manifest"]);
    let m: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(m["command"], "sharpness sec3");
    assert_eq!(m["params"], serde_json::json!({"k": "7", "p": "3"}));
}

#[test]
fn help_exits_zero() {
    assert_eq!(fqgeom(&["--help"]).status.code(), Some(0));
    assert_eq!(fqgeom(&["audit", "--help"]).status.code(), Some(0));
}
