use std::path::Path;

use blockgraph::cli::run;

fn cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["blockgraph"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, out, String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_query_search() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("fib.txt");
    let index = dir.path().join("fib.bg");
    std::fs::write(&input, b"abaababaabaababaababa").unwrap();

    let (code, out, _) = cli(&["build", "--input", s(&input), "--output", s(&index), "--bookmark-boundaries"]);
    assert_eq!(code, 0);
    let out = String::from_utf8(out).unwrap();
    assert!(out.lines().any(|l| l == "z=7"));

    assert_eq!(cli(&["extract", "--index", s(&index), "--from", "9", "--to", "12"]).1, b"abaa");
    assert_eq!(cli(&["access", "--index", s(&index), "--pos", "11"]).1, b"a");
    assert_eq!(cli(&["extract", "--index", s(&index), "--from", "1", "--to", "21"]).1, b"abaababaabaababaababa");
    assert_eq!(cli(&["extract", "--index", s(&index), "--from", "1", "--to", "22"]).0, 1);

    let (code, out, _) = cli(&["search", "--index", s(&index), "--pattern", "abaababa", "--k", "0"]);
    assert_eq!(code, 0);
    let ends: Vec<&str> = std::str::from_utf8(&out)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').next().unwrap())
        .collect();
    assert_eq!(ends, ["8", "16", "21"]);

    let (code, out, _) = cli(&["search", "--index", s(&index), "--pattern", "abaab", "--k", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(v.as_array().unwrap().iter().all(|m| m["dist"].as_u64().unwrap() <= 1));

    assert_eq!(cli(&["search", "--index", s(&index), "--pattern", "ab", "--k", "3"]).0, 2);

    let (code, out, _) = cli(&["stats", "--index", s(&index)]);
    assert_eq!(code, 0);
    let out = String::from_utf8(out).unwrap();
    for l in out.lines().filter(|l| l.starts_with("depth")) {
        let internal: usize = l.split("internal=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        assert!(internal <= 21);
    }
}

#[test]
fn missing_bookmarks_and_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    let index = dir.path().join("t.bg");
    std::fs::write(&input, b"abaababaabaababaababa").unwrap();
    assert_eq!(cli(&["build", "--input", s(&input), "--output", s(&index)]).0, 0);
    let (code, _, err) = cli(&["search", "--index", s(&index), "--pattern", "ab"]);
    assert_eq!(code, 1);
    assert!(err.contains("--bookmark-boundaries"));

    std::fs::write(&input, b"").unwrap();
    let (code, _, err) = cli(&["build", "--input", s(&input), "--output", s(&index)]);
    assert_eq!(code, 1);
    assert!(err.contains("empty input"));
}

#[test]
fn gen_corpus_and_flat_top() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let args = |p: &Path| {
        vec![
            "gen-corpus".to_string(),
            "--base-size".into(),
            "500".into(),
            "--copies".into(),
            "6".into(),
            "--mutation-rate".into(),
            "0.01".into(),
            "--seed".into(),
            "4".into(),
            "--output".into(),
            s(p).into(),
        ]
    };
    let run_args = |v: Vec<String>| cli(&v.iter().map(String::as_str).collect::<Vec<_>>()).0;
    assert_eq!(run_args(args(&a)), 0);
    assert_eq!(run_args(args(&b)), 0);
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta.len(), 3000);
    assert_eq!(ta, std::fs::read(&b).unwrap());

    assert_eq!(cli(&["gen-corpus", "--base-size", "0", "--copies", "1", "--output", s(&a)]).0, 2);
    assert_eq!(
        cli(&["gen-corpus", "--base-size", "5", "--copies", "1", "--mutation-rate", "1.5", "--output", s(&a)]).0,
        2
    );

    let index = dir.path().join("a.bg");
    assert_eq!(cli(&["build", "--input", s(&a), "--output", s(&index), "--flat-top", "3"]).0, 0);
    let out = String::from_utf8(cli(&["stats", "--index", s(&index)]).1).unwrap();
    let depths: Vec<&str> = out.lines().filter(|l| l.starts_with("depth")).collect();
    assert!(depths[0].starts_with("depth 3 block="));
    // n = 3000: blocks of 512 at stride 256, all (3000 - 1) / 256 of them
    assert!(depths[0].contains(" nodes=11 "));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    let index = dir.path().join("t.bg");
    let csv = dir.path().join("b.csv");
    std::fs::write(&input, blockgraph::corpus::fibonacci_word(16)).unwrap();
    assert_eq!(cli(&["build", "--input", s(&input), "--output", s(&index), "--bookmark-boundaries"]).0, 0);
    for extra in [None, Some("--bookmarked")] {
        let mut a = vec!["bench", "--index", s(&index), "--queries", "100", "--lengths", "1,16,256", "--csv", s(&csv)];
        a.extend(extra);
        assert_eq!(cli(&a).0, 0);
        let text = std::fs::read_to_string(&csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "length,mean,p50,p99,chars_per_sec");
        assert_eq!(lines.len(), 4);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
    }
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&[]).0, 2);
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&["extract", "--index", "x"]).0, 2);
    assert_eq!(cli(&["--help"]).0, 0);
    assert_eq!(cli(&["access", "--index", "/nonexistent/x.bg", "--pos", "1"]).0, 1);
}
