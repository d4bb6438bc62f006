use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capgram"))
        .args(args)
        .env_remove("CAPGRAM_MAX_STATES")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

struct Tmp(PathBuf);

impl Tmp {
    fn new(tag: &str) -> Tmp {
        let d = std::env::temp_dir().join(format!("capgram-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        Tmp(d)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Tmp {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const ANBN: &str = "nonterminals: S\nterminals: a b c\nstart: S\ncapacity: S=1\nrules:\n r1: S -> a S b;\n r2: S -> a b;\n";

#[test]
fn exit_codes() {
    assert_eq!(run(&["validate", &fixture("ex31.gr")]).status.code(), Some(0));
    assert_eq!(run(&["validate", "/nonexistent/file.gr"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate"]).status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_line() {
    let t = Tmp::new("parse");
    let bad = t.file("bad.gr", "nonterminals: S\nterminals: a\nstart: S\nrules:\n r: S -> q;\n");
    let o = run(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
    let zero = t.file("zero.gr", "nonterminals: S\nterminals: a\nstart: S\ncapacity: S=0\nrules:\n r: S -> a;\n");
    let o = run(&["validate", &zero]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity must be at least 1"));
}

#[test]
fn ex31_words_and_membership() {
    let out = stdout(&["enumerate", &fixture("ex31.gr"), "--max-len", "6"]);
    assert_eq!(out, "# exhaustive: true\nabc\naabbcc\n");
    let yes = stdout(&["member", &fixture("ex31.gr"), "abc"]);
    assert!(yes.starts_with("yes\nwitness: "));
    assert_eq!(stdout(&["member", &fixture("ex31.gr"), "ab"]), "no\n");
}

#[test]
fn empty_language_prints_only_the_header() {
    let t = Tmp::new("empty");
    let g = t.file("loop.gr", "nonterminals: S\nterminals: a\nstart: S\nrules:\n r: S -> a S;\n");
    assert_eq!(stdout(&["enumerate", &g, "--max-len", "4"]), "# exhaustive: true\n");
}

#[test]
fn state_budget_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_capgram"))
        .args(["enumerate", &fixture("ex31.gr")])
        .env("CAPGRAM_MAX_STATES", "5")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("# exhaustive: false\n"));
}

#[test]
fn net_build_run_and_export() {
    let t = Tmp::new("net");
    let net = t.path("sec2.net");
    stdout(&["net", "build", &fixture("ex-sec2.gr"), "--out", &net]);
    let text = std::fs::read_to_string(&net).unwrap();
    assert!(text.contains("places: p_S p_A p_B\n"));
    let transitions = text.lines().find(|l| l.starts_with("transitions:")).unwrap();
    assert_eq!(transitions.split_whitespace().count() - 1, 7);
    assert_eq!(stdout(&["net", "run", &net, "t_r0"]), "marking: p_A=1 p_B=1\n");
    assert_eq!(run(&["net", "run", &net, "t_r1"]).status.code(), Some(1));
    let dot = stdout(&["net", "export", &net]);
    assert!(dot.starts_with("digraph net {"));
    assert!(dot.trim_end().ends_with('}'));
    assert!(dot.contains("\"p_S\" -> \"t_r0\""));
}

#[test]
fn check_equal_reports_a_witness() {
    let t = Tmp::new("equal");
    let anbn = t.file("anbn.gr", ANBN);
    let out = stdout(&["check-equal", &fixture("ex31.gr"), &anbn, "--max-len", "6"]);
    assert!(out.starts_with("differs\n"));
    assert!(out.contains("only left: abc"));
    assert!(out.contains("only right: ab"));
    assert_eq!(stdout(&["check-equal", &anbn, &anbn, "--max-len", "6"]), "equal\n");
}

#[test]
fn transform_output_is_stable_and_has_provenance() {
    let t = Tmp::new("transform");
    let a = t.path("a.gr");
    let b = t.path("b.gr");
    stdout(&["transform", &fixture("ex31.gr"), "--to", "mat-fin", "--out", &a]);
    stdout(&["transform", &fixture("ex31.gr"), "--to", "mat-fin", "--out", &b]);
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let prov = std::fs::read_to_string(format!("{a}.prov")).unwrap();
    assert!(prov.lines().any(|l| l.starts_with("matrix ")));
    assert!(!stdout(&["validate", &a]).is_empty());
    let printed = stdout(&["transform", &fixture("ex31.gr"), "--to", "mat-fin"]);
    assert_eq!(printed.as_bytes(), &ta[..]);
}

#[test]
fn hom_and_union_from_the_command_line() {
    let t = Tmp::new("closure");
    let anbn = t.file("anbn.gr", ANBN);
    let h = t.path("h.gr");
    stdout(&["transform", &anbn, "--to", "hom", "--map", "a=x,b=~", "--out", &h]);
    assert_eq!(stdout(&["enumerate", &h, "--max-len", "3"]), "# exhaustive: true\nx\nxx\nxxx\n");
    let ab_star = t.file(
        "ab.gr",
        "nonterminals: S\nterminals: a b\nstart: S\ncapacity: S=1\nrules:\n e: S -> ~;\n x: S -> a S;\n y: S -> b S;\n",
    );
    let u = t.path("u.gr");
    stdout(&["transform", &anbn, "--to", "union", "--with", &ab_star, "--out", &u]);
    let words = stdout(&["enumerate", &u, "--max-len", "2"]);
    for w in ["(empty)", "a", "b", "ab", "ba", "aa", "bb"] {
        assert!(words.lines().any(|l| l == w), "{w} missing from {words}");
    }
}
