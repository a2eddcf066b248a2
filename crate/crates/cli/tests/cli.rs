use std::path::PathBuf;
use std::process::{Command, Output};

use lechkit_cli::harness::strip_timing;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn lechkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lechkit"))
        .args(args)
        .current_dir(fixtures_dir())
        .env_remove("LECH_DEGREE_CAP")
        .env_remove("LECH_T_CAP")
        .env_remove("LECH_E_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_cusp_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let o = lechkit(&["verify", "cusp.lk", "--seed", "7", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["summary"]["error"], 0);
    assert!(report["summary"]["pass"].as_u64().unwrap() > 0);
    for c in report["checks"].as_array().unwrap() {
        assert_eq!(c["verdict"], "pass", "{c}");
    }
}

#[test]
fn mult_of_cusp() {
    let o = lechkit(&["mult", "cusp.lk", "S"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("e = 2\n"));
}

#[test]
fn hk_of_cone_at_first_level() {
    let o = lechkit(&["hk", "cone.lk", "R", "--ideal", "m", "--emax", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with(": 3/2"), "{}", stdout(&o));
}

#[test]
fn embedded_fixture_by_name() {
    let o = Command::new(env!("CARGO_BIN_EXE_lechkit"))
        .args(["mult", "cusp", "S"])
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("e = 2"));
}

#[test]
fn same_seed_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = lechkit(&["verify", "quadric.lk", "--seed", "7", "--json", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        strip_timing(&std::fs::read_to_string(path).unwrap())
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };

    let syntax = write("syntax.lk", "field F(2)\nring R = F[x];\n");
    let o = lechkit(&["verify", &syntax]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2:1:"));

    let not_local = write("nonlocal.lk", "field F(3);\nring R = F[x];\nmap f : R -> R sends x -> x + 1;\ncheck lech f;\n");
    assert_eq!(lechkit(&["verify", &not_local]).status.code(), Some(3));

    // At q = 8 the estimate 22/8 is still 1/4 below e = 3, outside tolerance.
    let slow = write(
        "slow.lk",
        "field F(2);\nring S = F[y, z] / (z^2*y);\ncheck hk_sandwich S with emax 3;\n",
    );
    assert_eq!(lechkit(&["verify", &slow]).status.code(), Some(1));

    let non_primary = write(
        "nonprimary.lk",
        "field F(2);\nring S = F[x, y];\nideal I = (x) in S;\ncheck hk_sandwich S with ideal I;\n",
    );
    assert_eq!(lechkit(&["verify", &non_primary]).status.code(), Some(3));

    let no_level = write("nolevel.lk", "field F(2);\nring S = F[x, y];\ncheck hk_sandwich S with emax 0;\n");
    assert_eq!(lechkit(&["verify", &no_level]).status.code(), Some(2));

    let capped = lechkit(&["hk", "cone.lk", "R", "--ideal", "m", "--emax", "7"]);
    assert_eq!(capped.status.code(), Some(2));

    assert_eq!(lechkit(&["verify", "missing-file.lk"]).status.code(), Some(3));
    assert_eq!(lechkit(&["verify", "cusp.lk", "--checks", "nonsense"]).status.code(), Some(3));
    assert_eq!(lechkit(&["verify", "cusp.lk", "--checks", "lech,edim"]).status.code(), Some(0));
}

#[test]
fn check_filter_limits_the_run() {
    let o = lechkit(&["verify", "cusp.lk", "--checks", "lech"]);
    let out = stdout(&o);
    assert!(out.contains("lech"));
    assert!(!out.contains("hk_chain"));
    assert!(out.ends_with("1 pass, 0 fail, 0 inconclusive, 0 error\n"), "{out}");
}

#[test]
fn env_caps_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_lechkit"))
        .args(["verify", "cusp.lk", "--checks", "hk_sandwich", "--json", json.to_str().unwrap()])
        .current_dir(fixtures_dir())
        .env("LECH_E_CAP", "1")
        .env("LECH_T_CAP", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["caps"]["e_cap"], 1);
    assert_eq!(v["caps"]["t_cap"], 12);
    let bad = Command::new(env!("CARGO_BIN_EXE_lechkit"))
        .args(["mult", "cusp.lk", "S"])
        .current_dir(fixtures_dir())
        .env("LECH_DEGREE_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn other_subcommands() {
    let gb = stdout(&lechkit(&["gb", "cusp.lk", "A"]));
    assert!(gb.contains("x^2"), "{gb}");
    let len = stdout(&lechkit(&["length", "cusp.lk", "R", "A"]));
    assert!(len.contains("local length: 2"), "{len}");
    let cohen = stdout(&lechkit(&["cohen", "cusp.lk", "f"]));
    assert!(cohen.contains("c = 1") && cohen.contains("J in n_T^2: true"), "{cohen}");
    let spec = lechkit(&["specialize", "cusp.lk", "f", "--primes", "2,3,5,7"]);
    assert_eq!(spec.status.code(), Some(0));
    assert!(stdout(&spec).contains("0 of 4 primes are bad"));
    let list = stdout(&lechkit(&["fixtures", "list"]));
    assert_eq!(list.lines().count(), lechkit_cli::registry::FIXTURES.len());
}

#[test]
fn whole_corpus_passes() {
    let o = lechkit(&["fixtures", "run-all", "--seed", "7"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains(" 0 fail, 0 inconclusive, 0 error"));
}
