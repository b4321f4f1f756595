use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

struct Files {
    dir: TempDir,
}

impl Files {
    fn new() -> Self {
        Files {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn put(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_treespan"));
    cmd.env_remove("TREESPAN_MAX_NODES");
    for a in args {
        cmd.arg(a);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn sample(f: &Files) -> (PathBuf, PathBuf) {
    (
        f.put("s.tree", "root r\narc r x\narc r y\n"),
        f.put(
            "t.tree",
            "root 1\narc 1 2\narc 1 3\narc 3 4\narc 4 5\narc 4 6\n",
        ),
    )
}

fn forest_cospan(f: &Files) -> [PathBuf; 5] {
    [
        f.put("t1.tree", "root a1\narc a1 b\narc a1 c\n"),
        f.put("t2.tree", "root a2\narc a2 b\narc a2 c\n"),
        f.put("t.tree", "root a1\narc a1 a2\narc a2 b\narc a2 c\n"),
        f.put("f1.map", "map a1 a1\nmap b b\nmap c c\n"),
        f.put("f2.map", "map a2 a2\nmap b b\nmap c c\n"),
    ]
}

#[test]
fn verify_reports_the_next_kind() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let m = f.put("f.map", "map r 1\nmap x 5\nmap y 6\n");
    let o = run(&[&"verify", &"--kind", &"minor", &s, &t, &m]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "minor: yes; topological: no\n");
}

#[test]
fn failed_verify_exits_one_with_a_reason() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let m = f.put("f.map", "map r 1\nmap x 5\nmap y 6\n");
    let o = run(&[&"verify", &"--kind", &"topological", &s, &t, &m]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("topological: no ("));
}

#[test]
fn isomorphic_verify_has_no_next_kind() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let m = f.put("f.map", "map r 4\nmap x 5\nmap y 6\n");
    let o = run(&[&"verify", &"-k", &"iso", &s, &t, &m]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "isomorphic: yes\n");
}

#[test]
fn classify_prints_the_strongest_kind() {
    let f = Files::new();
    let (s, t) = sample(&f);
    for (images, want) in [
        (["1", "3", "4"], "none"),
        (["1", "5", "6"], "minor"),
        (["1", "2", "6"], "topological"),
        (["1", "2", "4"], "homeomorphic"),
        (["1", "2", "3"], "isomorphic"),
    ] {
        let m = f.put(
            "f.map",
            &format!(
                "map r {}\nmap x {}\nmap y {}\n",
                images[0], images[1], images[2]
            ),
        );
        let o = run(&[&"classify", &s, &t, &m]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), want, "{images:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let m = f.put("f.map", "map r 1\nmap x 5\nmap y 6\n");
    assert_eq!(
        run(&[&"verify", &"--kind", &"bogus", &s, &t, &m])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&[&"verify", &s]).status.code(), Some(2));
    assert_eq!(run(&[&"no-such-command"]).status.code(), Some(2));
}

#[test]
fn bad_input_exits_three() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let m = f.put("f.map", "map r 1\nmap x 5\nmap y 6\n");
    let missing = f.path("missing.tree");
    let o = run(&[&"verify", &"--kind", &"minor", &missing, &t, &m]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.tree"));

    let bad = f.put("bad.tree", "root r\narc q x\n");
    assert_eq!(
        run(&[&"verify", &"--kind", &"minor", &bad, &t, &m])
            .status
            .code(),
        Some(3)
    );
    let cyclic = f.put("cyc.tree", "root r\narc r x\narc x r\n");
    assert_eq!(run(&[&"classify", &cyclic, &t, &m]).status.code(), Some(3));
    let unknown = f.put("u.map", "map r 1\nmap x 5\nmap y 99\n");
    assert_eq!(run(&[&"classify", &s, &t, &unknown]).status.code(), Some(3));
    let partial = f.put("p.map", "map r 1\nmap x 5\n");
    assert_eq!(run(&[&"classify", &s, &t, &partial]).status.code(), Some(3));
}

#[test]
fn isomorphic_lcst_of_sample_trees_has_three_nodes() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let o = run(&[&"lcst", &"--kind", &"iso", &s, &t]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("size: 3\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("arc ")).count(), 2);
}

#[test]
fn max_nodes_limit_is_an_input_error() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let o = run(&[&"scst", &"--kind", &"iso", &"--max-nodes", &"2", &s, &t]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn forest_intersection_has_no_pullback() {
    let f = Files::new();
    let [t1, t2, t, f1, f2] = forest_cospan(&f);
    let o = run(&[
        &"check-pullback",
        &"--kind",
        &"minor",
        &"--bound",
        &"3",
        &t1,
        &t2,
        &t,
        &f1,
        &f2,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict: CounterexampleFound"), "{text}");
    assert!(text.contains("# probe"));

    let o = run(&[&"intersect", &"--kind", &"minor", &t1, &t2, &t, &f1, &f2]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("shape: forest\n"));
}

#[test]
fn pushout_of_a_lcst_is_verified() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let o = run(&[
        &"--out",
        &f.path("span"),
        &"lcst",
        &"--kind",
        &"topological",
        &s,
        &t,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (mu, m1, m2) = (
        f.path("span/apex.tree"),
        f.path("span/left.map"),
        f.path("span/right.map"),
    );
    let o = run(&[
        &"check-pushout",
        &"--kind",
        &"topological",
        &"--bound",
        &"3",
        &s,
        &t,
        &mu,
        &m1,
        &m2,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("verdict: VerifiedUpToBound"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn sum_writes_dot_and_out_files() {
    let f = Files::new();
    let t1 = f.put("t1.tree", "root a\narc a b\narc a c\n");
    let t2 = f.put("t2.tree", "root a\narc a b\narc b d\n");
    let mu = f.put("mu.tree", "root a\narc a b\n");
    let m = f.put("m.map", "map a a\nmap b b\n");
    let dot = f.path("sum.dot");
    let out = f.path("nested/out");
    let o = run(&[
        &"--dot", &dot, &"--out", &out, &"--plain", &"sum", &"--kind", &"iso", &t1, &t2, &mu, &m,
        &m,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.contains("# supertree"));
    let apex = fs::read_to_string(out.join("apex.tree")).unwrap();
    assert_eq!(apex.lines().filter(|l| l.starts_with("arc ")).count(), 3);
    assert!(!apex.contains("1:") && !apex.contains("2:"), "{apex}");
    assert!(out.join("left.map").exists() && out.join("right.map").exists());
    let dot = fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("->"));
}

#[test]
fn output_is_deterministic() {
    let f = Files::new();
    let (s, t) = sample(&f);
    for cmd in ["lcst", "scst"] {
        let a = stdout(&run(&[&cmd, &"--kind", &"minor", &s, &t]));
        let b = stdout(&run(&[&cmd, &"--kind", &"minor", &s, &t]));
        assert_eq!(a, b);
    }
    let a = run(&[&"proptest", &"--seed", &"3", &"--cases", &"20"]);
    let b = run(&[&"proptest", &"--seed", &"3", &"--cases", &"20"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a)
            .lines()
            .filter(|l| l.starts_with("PASS "))
            .count(),
        5
    );
}

#[test]
fn round_trip_commands_chain() {
    let f = Files::new();
    let (s, t) = sample(&f);
    let sub = f.path("sub");
    let sup = f.path("sup");
    assert_eq!(
        run(&[&"--out", &sub, &"lcst", &"--kind", &"homeo", &s, &t])
            .status
            .code(),
        Some(0)
    );
    let o = run(&[
        &"--out",
        &sup,
        &"sub2super",
        &"--kind",
        &"homeo",
        &s,
        &t,
        &sub.join("apex.tree"),
        &sub.join("left.map"),
        &sub.join("right.map"),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = run(&[
        &"super2sub",
        &"--kind",
        &"homeo",
        &s,
        &t,
        &sup.join("apex.tree"),
        &sup.join("left.map"),
        &sup.join("right.map"),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let back = stdout(&o);
    let first = fs::read_to_string(sub.join("apex.tree")).unwrap();
    let arcs = |s: &str| s.lines().filter(|l| l.starts_with("arc ")).count();
    assert_eq!(arcs(&back), arcs(&first));
}
