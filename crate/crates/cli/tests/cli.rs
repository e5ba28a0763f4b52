use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

use serde_json::Value;
use tqmine_core::{DataGraph, PatternStore, Tree, TreePattern};

const G7: &str = "0 1\n0 2\n0 3\n1 4\n2 4\n2 5\n3 6\n";
const LHS: &str = "x1,x3,x4\n(x1:d (x2:p) (x3:d) (x4:d))\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tqmine"))
}

struct Work {
    dir: tempfile::TempDir,
}

impl Work {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g7.edges"), G7).unwrap();
        std::fs::write(dir.path().join("lhs.txt"), LHS).unwrap();
        Work { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        bin()
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> (String, Value) {
        let out = self.run(args);
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let last = stdout.lines().last().unwrap();
        let summary = serde_json::from_str(last).unwrap();
        (stdout, summary)
    }

    fn fail(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(!out.status.success(), "{args:?} succeeded");
        String::from_utf8(out.stderr).unwrap()
    }

    fn rules_store(&self) {
        self.ok(&[
            "mine",
            "--graph",
            "g7.edges",
            "--minsup",
            "3",
            "--max-nodes",
            "4",
            "--out",
            "store4",
            "--tree",
            "0,1,1",
            "--tree",
            "0,1,1,1",
        ]);
    }
}

fn rules_args<'a>(minconf: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "rules",
        "--store",
        "store4",
        "--lhs",
        "lhs.txt",
        "--minconf",
        minconf,
        "--out",
        out,
        "--rhs-max-nodes",
        "3",
    ]
}

#[test]
fn mine_reproduces_the_example_tables() {
    let w = Work::new();
    let (_, s) = w.ok(&[
        "mine",
        "--graph",
        "g7.edges",
        "--minsup",
        "3",
        "--max-nodes",
        "3",
        "--out",
        "store",
    ]);
    assert_eq!(s["command"], "mine");
    assert_eq!(s["nodes"], 7);
    assert_eq!(s["edges"], 7);
    assert_eq!(s["patterns"].as_u64().unwrap() as usize, 20);
    assert!(w.path("store/report.txt").exists());

    let g = DataGraph::load(&w.path("g7.edges")).unwrap();
    let store = PatternStore::load(&w.path("store"), &g).unwrap();
    let t = Tree::from_levels(vec![0, 1, 1]).unwrap();
    let table = |pi: &[usize], sigma: &[usize]| {
        let p = TreePattern::new(t.clone(), pi, sigma).unwrap();
        let found = store.lookup(&p).unwrap().table();
        found
            .entries
            .iter()
            .map(|(k, &c)| {
                (
                    k.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>(),
                    c,
                )
            })
            .collect::<Vec<_>>()
    };
    let row = |k: &[&str], c: u64| (k.iter().map(|s| s.to_string()).collect::<Vec<_>>(), c);
    assert_eq!(table(&[], &[]), vec![row(&[], 15)]);
    assert_eq!(table(&[], &[0]), vec![row(&["0"], 9), row(&["2"], 4)]);
    assert_eq!(table(&[0], &[]), vec![row(&[], 14)]);
    assert_eq!(
        table(&[], &[0, 1]),
        vec![
            row(&["0", "1"], 3),
            row(&["0", "2"], 3),
            row(&["0", "3"], 3)
        ]
    );
    assert_eq!(
        table(&[0], &[1]),
        vec![row(&["1"], 3), row(&["2"], 3), row(&["3"], 3)]
    );
}

#[test]
fn mine_one_shape_reports_the_candidate_counts() {
    let w = Work::new();
    let (_, s) = w.ok(&[
        "mine",
        "--graph",
        "g7.edges",
        "--minsup",
        "3",
        "--max-nodes",
        "3",
        "--out",
        "store",
        "--tree",
        "0,1,1",
    ]);
    assert_eq!(s["patterns"], 6);
    assert_eq!(s["evaluated"], 8);
    assert_eq!(s["pruned"], 14);
    assert_eq!(s["redundant"], 2);
    assert_eq!(s["noncanonical"], 3);
}

#[test]
fn mine_is_deterministic() {
    let w = Work::new();
    for out in ["a", "b"] {
        w.ok(&[
            "mine",
            "--graph",
            "g7.edges",
            "--minsup",
            "2",
            "--max-nodes",
            "4",
            "--out",
            out,
        ]);
    }
    let mut names: Vec<_> = std::fs::read_dir(w.path("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 3);
    for n in names {
        assert_eq!(
            std::fs::read(w.path("a").join(&n)).unwrap(),
            std::fs::read(w.path("b").join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn mine_argument_errors() {
    let w = Work::new();
    w.fail(&[
        "mine",
        "--graph",
        "g7.edges",
        "--minsup",
        "0",
        "--max-nodes",
        "3",
        "--out",
        "s",
    ]);
    w.fail(&[
        "mine",
        "--graph",
        "g7.edges",
        "--minsup",
        "1",
        "--max-nodes",
        "0",
        "--out",
        "s",
    ]);
    let err = w.fail(&[
        "mine",
        "--graph",
        "missing.edges",
        "--minsup",
        "3",
        "--max-nodes",
        "3",
        "--out",
        "s",
    ]);
    assert!(err.contains("missing.edges"), "{err}");
    let err = w.fail(&[
        "mine",
        "--graph",
        "g7.edges",
        "--minsup",
        "3",
        "--max-nodes",
        "3",
        "--out",
        "s",
        "--tree",
        "0,2",
    ]);
    assert!(err.contains("--tree"), "{err}");
}

#[test]
fn rules_for_the_fixture() {
    let w = Work::new();
    w.rules_store();
    let (stdout, s) = w.ok(&rules_args("30%", "rules.txt"));
    assert_eq!(s["rules"], 6);
    assert_eq!(s["rows"], 21);
    let text = std::fs::read_to_string(w.path("rules.txt")).unwrap();
    assert_eq!(
        text.matches("\nRHO ").count() + usize::from(text.starts_with("RHO ")),
        6
    );
    assert!(stdout.starts_with(&text));

    let (_, s) = w.ok(&rules_args("0.3", "again.txt"));
    assert_eq!(s["rows"], 21);
    assert_eq!(text, std::fs::read_to_string(w.path("again.txt")).unwrap());

    let (_, s) = w.ok(&rules_args("100%", "none.txt"));
    assert_eq!(s["rules"], 0);
    assert_eq!(s["rows"], 0);

    let mut args = rules_args("30%", "full.txt");
    args.extend(["--equivalence", "full"]);
    let (_, s) = w.ok(&args);
    assert_eq!(s["rules"], 4);
}

#[test]
fn rules_errors() {
    let w = Work::new();
    w.rules_store();
    std::fs::write(w.path("bad.txt"), "(x1:d (x2:q))").unwrap();
    let err = w.fail(&[
        "rules",
        "--store",
        "store4",
        "--lhs",
        "bad.txt",
        "--minconf",
        "30%",
        "--out",
        "r.txt",
    ]);
    assert!(err.contains("line 1, column"), "{err}");

    std::fs::write(w.path("deep.txt"), "(x1:d (x2:p (x3:d)))").unwrap();
    let err = w.fail(&[
        "rules",
        "--store",
        "store4",
        "--lhs",
        "deep.txt",
        "--minconf",
        "30%",
        "--out",
        "r.txt",
    ]);
    assert!(err.contains("not in the store"), "{err}");

    let err = w.fail(&rules_args("130%", "r.txt"));
    assert!(err.contains("confidence"), "{err}");

    std::fs::write(w.path("other.edges"), format!("{G7}6 0\n")).unwrap();
    let mut args = rules_args("30%", "r.txt");
    args.extend(["--graph", "other.edges"]);
    let err = w.fail(&args);
    assert!(err.contains("fingerprint"), "{err}");

    let err = w.fail(&[
        "rules",
        "--store",
        "nowhere",
        "--lhs",
        "lhs.txt",
        "--minconf",
        "30%",
        "--out",
        "r.txt",
    ]);
    assert!(err.contains("nowhere"), "{err}");
}

struct Server {
    child: Child,
    addr: String,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn serve(dir: &Path, store: &str, graph: &str) -> Server {
    let mut child = bin()
        .current_dir(dir)
        .args(["serve", "--store", store, "--graph", graph, "--port", "0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stdout.take().unwrap()).lines();
    let mut addr = None;
    for line in lines.by_ref() {
        let line = line.unwrap();
        if let Ok(v) = serde_json::from_str::<Value>(&line) {
            addr = v["addr"].as_str().map(String::from);
            break;
        }
    }
    let addr = addr.expect("server announced its address");
    Server { child, addr }
}

fn http(addr: &str, method: &str, path: &str, body: Option<&str>) -> (u16, String) {
    let mut s = TcpStream::connect(addr).unwrap();
    let body = body.unwrap_or("");
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut resp = String::new();
    s.read_to_string(&mut resp).unwrap();
    let status = resp[9..12].parse().unwrap();
    let (_, payload) = resp.split_once("\r\n\r\n").unwrap();
    (status, payload.to_string())
}

#[test]
fn served_rules_match_the_cli() {
    let w = Work::new();
    w.rules_store();
    let mut args = rules_args("30%", "rules.json");
    args.extend(["--format", "json"]);
    w.ok(&args);
    let cli: Value =
        serde_json::from_str(&std::fs::read_to_string(w.path("rules.json")).unwrap()).unwrap();
    assert_eq!(cli.as_array().unwrap().len(), 6);

    let server = serve(w.dir.path(), "store4", "g7.edges");
    let req = serde_json::json!({"lhs": LHS, "minconf": "30%", "rhs_max_nodes": 3}).to_string();
    let (status, body) = http(&server.addr, "POST", "/rules", Some(&req));
    assert_eq!(status, 200);
    let api: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(api, cli);

    let (status, body) = http(&server.addr, "GET", "/patterns", None);
    assert_eq!(status, 200);
    let listed: Vec<String> = serde_json::from_str::<Value>(&body)
        .unwrap()
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["key"].as_str().unwrap().to_string())
        .collect();
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(w.path("store4/manifest.json")).unwrap())
            .unwrap();
    let stored: Vec<String> = manifest["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["key"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(listed, stored);
}

#[test]
fn serve_refuses_a_stale_store() {
    let w = Work::new();
    w.rules_store();
    std::fs::write(w.path("other.edges"), format!("{G7}6 0\n")).unwrap();
    let err = w.fail(&[
        "serve",
        "--store",
        "store4",
        "--graph",
        "other.edges",
        "--port",
        "0",
    ]);
    assert!(err.contains("fingerprint"), "{err}");
}

#[test]
fn serve_fails_when_the_port_is_taken() {
    let w = Work::new();
    w.rules_store();
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let err = w.fail(&[
        "serve", "--store", "store4", "--graph", "g7.edges", "--port", &port,
    ]);
    assert!(err.contains("cannot listen"), "{err}");
}
