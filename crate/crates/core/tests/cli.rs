use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_papseries")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.split_whitespace().next() == Some(key)).unwrap();
    line.split_whitespace().nth(1).unwrap().parse().unwrap()
}

#[test]
fn enumerate_examples() {
    assert!(stdout(&["enumerate", "--pattern", "25314", "--max-n", "7"]).lines().any(|l| l.trim() == "7 4578"));
    assert!(stdout(&["enumerate", "--pattern", "123", "--max-n", "5"]).lines().any(|l| l.trim() == "5 42"));
    assert!(stdout(&["enumerate", "--pattern", "54321", "--max-n", "4"]).lines().any(|l| l.trim() == "4 24"));
}

#[test]
fn classify_small_lengths() {
    let three = stdout(&["classify", "--length", "3", "--max-n", "8"]);
    assert!(three.contains('6'), "{three}");
    let one = stdout(&["classify", "--length", "1", "--max-n", "5"]);
    assert!(!one.trim().is_empty());
}

#[test]
fn bounds_examples() {
    assert_eq!(field(&stdout(&["bounds", "--series", "catalan", "--proven"]), "hhr_bound"), 4.0);
    assert!((field(&stdout(&["bounds", "--series", "35214", "--terms", "27"]), "last_hhr_bound") - 13.1159).abs() < 1e-3);
    assert!((field(&stdout(&["bounds", "--series", "53241", "--terms", "26"]), "last_hhr_bound") - 15.4445).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["enumerate", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--pattern", "12x", "--max-n", "4"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "--pattern", "1342", "--max-n", "12", "--node-cap", "100"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["--format", "json", "analyze", "--series", "12453", "--terms", "17", "--extend", "4", "--orders", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn geometric_extension_is_exact() {
    let out = stdout(&["extend", "--series", "geometric:3:12", "--count", "5", "--series-format", "csv"]);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split(',').collect()).filter(|r: &Vec<&str>| r[0].parse::<u32>().is_ok()).collect();
    assert_eq!(rows.len(), 17);
    for r in rows {
        let n: u32 = r[0].parse().unwrap();
        assert_eq!(r[1], 3u64.pow(n).to_string());
        assert_eq!(r[2], if n >= 12 { "true" } else { "false" });
    }
}
