use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_gem-census");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("GEMCENSUS_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, max: usize) -> String {
    let path = dir.join(format!("census{max}.txt"));
    let o = run(&["generate", "--max-order", &max.to_string(), "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["generate"]).status.code(), Some(1));
    assert_eq!(run(&["cat", "/nonexistent/catalogue.txt"]).status.code(), Some(1));
    assert_eq!(run(&["code", "--roundtrip", "--in", "/nonexistent"]).status.code(), Some(1));
}

#[test]
fn zero_threads_is_rejected() {
    let o = Command::new(BIN).args(["names", "--table2"]).env("GEMCENSUS_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--threads", "0", "names", "--table2"]).status.code(), Some(1));
    assert_eq!(run(&["--threads", "1", "names", "--table2"]).status.code(), Some(0));
}

#[test]
fn generate_table1_and_catalogue() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    let o = run(&["generate", "--max-order", "18", "--table1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "2p        14  16  18\nbip        1   2   4\nnon-bip    1   1   1\n");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# gem-census catalogue v1.0\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 10);

    let t = run(&["table1", "--in", path.to_str().unwrap()]);
    assert_eq!(stdout(&t), stdout(&o));

    let only = run(&["cat", path.to_str().unwrap(), "--only", "non-bipartite"]);
    let lines: Vec<String> = stdout(&only).lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.contains(";N;")));
}

#[test]
fn config_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("gem.conf");
    fs::write(&config, "# desk run\nmax-order = 16\ntable1 = true\nmoves = gd-cancel\n").unwrap();
    let o = run(&["--config", config.to_str().unwrap(), "generate"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "2p        14  16\nbip        1   2\nnon-bip    1   1\n");

    // command line wins over the file
    let o = run(&["--config", config.to_str().unwrap(), "generate", "--max-order", "14"]);
    assert_eq!(stdout(&o), "2p        14\nbip        1\nnon-bip    1\n");

    fs::write(&config, "no-such-key = 3\n").unwrap();
    assert_eq!(run(&["--config", config.to_str().unwrap(), "generate"]).status.code(), Some(1));
}

#[test]
fn code_roundtrip_invariants_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    let small = generate(dir.path(), 16);
    let large = generate(dir.path(), 18);

    let rt = run(&["code", "--in", &large, "--roundtrip"]);
    assert!(rt.status.success());
    assert!(stdout(&rt).contains("0 round-trip failures"));

    let inv = run(&["invariants", "--in", &small]);
    let text = stdout(&inv);
    assert!(text.contains("H1=Z/2+Z/2"));
    assert!(text.contains("H1=Z+Z/2"));

    let d = run(&["diff", &small, &large]);
    assert!(d.status.success());
    assert_eq!(stdout(&d).lines().filter(|l| l.starts_with("> 18;")).count(), 5);
    assert!(!stdout(&d).contains("< "));
    let same = run(&["diff", &small, &small]);
    assert!(stdout(&same).lines().all(|l| !l.starts_with('>') && !l.starts_with('<')));
}

#[test]
fn split_recovers_a_sum() {
    let dir = tempfile::tempdir().unwrap();
    let cat = generate(dir.path(), 14);
    let text = fs::read_to_string(&cat).unwrap();
    let first = text.lines().find(|l| !l.starts_with('#') && l.contains(";B;")).unwrap();
    let code: String = first.split(';').skip(1).take(2).collect::<Vec<_>>().join(";");
    let o = run(&["split", "--code", &code]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn classify_strict_and_class_file() {
    let dir = tempfile::tempdir().unwrap();
    let cat = generate(dir.path(), 18);
    let classes = dir.path().join("classes.txt");
    let o = run(&["classify", "--in", &cat, "--out", classes.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let parsed = gemcensus::catalog::load_classes(&classes).unwrap();
    assert_eq!(parsed.iter().map(|c| c.members.len()).sum::<usize>(), 10);
    assert_eq!(parsed.len(), 7);
    assert!(parsed.iter().all(|c| !c.unresolved));

    let starved = run(&["classify", "--in", &cat, "--budget", "4,4,4,1", "--max-frontier", "1", "--strict"]);
    assert_eq!(starved.status.code(), Some(2));

    let unknown = run(&["classify", "--in", &cat, "--moves", "teleport"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn names_tables() {
    let t2 = run(&["names", "--table2"]);
    assert!(t2.status.success());
    assert!(stdout(&t2).contains("S3/Q8"));
    let t3 = run(&["names", "--table3"]);
    assert!(t3.status.success());
    assert!(!stdout(&t3).is_empty());
}
