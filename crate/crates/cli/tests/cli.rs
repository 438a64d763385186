use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_orientcycle"));
    c.env_remove("ORIENTCYCLE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    assert!(run(&full).status.success());
    path
}

#[test]
fn solve_exit_codes_follow_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let ex = gen_to(dir.path(), "ex.txt", &["extremal", "-m", "1"]);
    let none = run(&["solve", "-g", &ex, "-p", "@antidirected:12"]);
    assert_eq!(none.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&none)).unwrap();
    assert_eq!(v["verdict"], "none");
    let found = run(&["solve", "-g", &ex, "-p", "@standard:12"]);
    assert_eq!(found.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&found)).unwrap();
    assert_eq!(v["embedding"]["vertices"].as_array().unwrap().len(), 12);
}

#[test]
fn anchored_path_search() {
    let dir = tempfile::tempdir().unwrap();
    let c = gen_to(dir.path(), "c3.txt", &["cycle", "-n", "3"]);
    let o = run(&["solve", "-g", &c, "-p", "FF", "--path", "--from", "0", "--to", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["embedding"]["vertices"], serde_json::json!([0, 1, 2]));
    // a closed pattern with --path, or anchors on a cycle, is a usage error
    assert_eq!(run(&["solve", "-g", &c, "-p", "FFF*", "--path"]).status.code(), Some(3));
    assert_eq!(run(&["solve", "-g", &c, "-p", "FFF*", "--from", "0"]).status.code(), Some(3));
}

#[test]
fn tiny_budget_can_leave_the_verdict_open() {
    let dir = tempfile::tempdir().unwrap();
    let ex = gen_to(dir.path(), "ex.txt", &["extremal", "-m", "1"]);
    let o = run(&["solve", "-g", &ex, "-p", "@antidirected:12", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_use_their_own_code() {
    let o = run(&["solve", "-g", "/nonexistent/graph.txt", "-p", "FFF*"]);
    assert_eq!(o.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "n 3 kind oriented\n0 1\n1 0\n").unwrap();
    let o = run(&["solve", "-g", bad.to_str().unwrap(), "-p", "FFF*"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn gen_is_seeded() {
    let a = run(&["gen", "random-oriented", "-n", "12", "--seed", "5"]);
    let b = run(&["gen", "random-oriented", "-n", "12", "--seed", "5"]);
    let c = run(&["gen", "random-oriented", "-n", "12", "--seed", "6"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn extremal_verify_reports_success() {
    let o = run(&["extremal", "-m", "1", "--verify"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["anti_directed_hamiltonian"], "none");
    assert_eq!(v["audit"]["min_semi_degree"], 4);
}

#[test]
fn traverse_and_expansion_on_a_tournament() {
    let dir = tempfile::tempdir().unwrap();
    let t = gen_to(dir.path(), "t.txt", &["rotational", "-n", "9"]);
    let o = run(&["traverse", "-g", &t, "--from", "0", "--to", "4", "--alpha", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["length"].as_u64().unwrap() <= v["bound"].as_u64().unwrap());
    let perm = dir.path().join("perm.txt");
    fs::write(&perm, "0 1 2 3 4 5 6 7 8\n").unwrap();
    let from_file = run(&["traverse", "-g", &t, "--cycle", perm.to_str().unwrap(), "--from", "0", "--to", "4"]);
    let inline = run(&["traverse", "-g", &t, "--cycle", "0,1,2,3,4,5,6,7,8", "--from", "0", "--to", "4"]);
    assert!(from_file.status.success());
    assert_eq!(from_file.stdout, inline.stdout);

    let cyc = gen_to(dir.path(), "c.txt", &["cycle", "-n", "8"]);
    let o = run(&["expand-check", "-g", &cyc, "--alpha", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["expand-check", "-g", &t, "--alpha", "0.1", "--mode", "sampled", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pair_check_distinguishes_exact_and_sampled() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("block.txt");
    let mut text = String::from("left 6\nright 6\n");
    for i in 0..3 {
        for j in 0..3 {
            text += &format!("{i} {j}\n{} {}\n", i + 3, j + 3);
        }
    }
    fs::write(&p, text).unwrap();
    let p = p.to_str().unwrap();
    assert_eq!(run(&["pair-check", "-p", p, "--eps", "0.3"]).status.code(), Some(1));
    let full = gen_to(dir.path(), "full.txt", &["pair", "-n", "30", "-p", "1.0"]);
    assert_eq!(run(&["pair-check", "-p", &full, "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(run(&["pair-check", "-p", p, "--eps", "0.3", "--mode", "sampled"]).status.code(), Some(1));
    let small = gen_to(dir.path(), "small.txt", &["pair", "-n", "6", "-p", "1.0"]);
    assert_eq!(run(&["pair-check", "-p", &small, "--eps", "0.1", "-d", "0.9"]).status.code(), Some(0));
}

#[test]
fn embed_balances_on_a_dense_reduced_graph() {
    let dir = tempfile::tempdir().unwrap();
    let r = gen_to(dir.path(), "r.txt", &["rotational", "-n", "7"]);
    let o = run(&["embed", "-g", &r, "-p", "@random:602:3", "--seed", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["homomorphic"], true);
    assert_eq!(v["certificate"]["balanced"], true);
}

#[test]
fn census_and_probe_are_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed":4,"generator":{"kind":"random-oriented","n":8,"p":0.7,"count":30},"patterns":["standard","random"]}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let o = bin()
            .env("ORIENTCYCLE_THREADS", threads)
            .args(["census", "-c", cfg, "-o", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push(fs::read(out.join("records.jsonl")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let probe = dir.path().join("probe.json");
    fs::write(
        &probe,
        r#"{"seed":2,"generator":{"kind":"exact-semi-degree","n":8,"degrees":[],"count":3},"patterns":["standard","anti-directed","random"]}"#,
    )
    .unwrap();
    let a = run(&["probe", "-c", probe.to_str().unwrap()]);
    let b = run(&["--seed", "2", "probe", "-c", probe.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
