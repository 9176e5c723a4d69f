//! Acceptance run: one PASS/FAIL/SKIP line per criterion, nonzero exit on
//! any failure. Every threshold is a named constant below.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use blockgraph::bookmarks::extract_with_bookmark_into;
use blockgraph::builder::validate_with;
use blockgraph::corpus::{fibonacci_word, generate, CorpusConfig};
use blockgraph::format::{self, FormatError};
use blockgraph::lz77::{self, PhraseKind};
use blockgraph::matcher::{extraction_budget, search_with, Engine, SearchStats};
use blockgraph::{BlockIndex, BuildConfig, TextIndex, Visits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXTRACT_CORPORA: usize = 20;
const EXTRACT_QUERIES: usize = 100_000;
const EXTRACT_MAX_N: usize = 1 << 20;

const LZ_STRINGS: usize = 200;
const LZ_MAX_N: usize = 2000;
const FIB8_Z: usize = 7;

const INTERNAL_PER_PHRASE: usize = 3;

const COMPRESS_BASE: usize = 256 * 1024;
const COMPRESS_COPIES: usize = 64;
const COMPRESS_COPIES_LARGE: usize = 256;
const COMPRESS_SUBS: usize = 2;
const COMPRESS_MAX_RATIO: f64 = 0.35;
const COMPRESS_MAX_GROWTH: f64 = 1.5;

const EINSTEIN_GRAPH_BYTES: f64 = 3_969_392.0;
const EINSTEIN_TOLERANCE: f64 = 0.25;
const EINSTEIN_ENV: &str = "BLOCKGRAPH_EINSTEIN";

const SEARCH_MAX_N: usize = 50_000;
const SEARCH_M: (usize, usize) = (4, 32);
const SEARCH_MAX_K: usize = 4;
const SEARCH_PATTERNS_PER_CLASS: usize = 500;

const LOCALITY_N: usize = 1 << 20;
const LOCALITY_MAX_LEN: usize = 4096;
const LOCALITY_QUERIES: usize = 500;
const VISITS_PER_CHAR: usize = 8;
const VISITS_SLACK: usize = 16;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

struct Case {
    text: Vec<u8>,
    index: BlockIndex,
}

fn log2_ceil(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

fn corpus(base: usize, copies: usize, rate: f64, alphabet: usize, seed: u64) -> Vec<u8> {
    generate(&CorpusConfig {
        base_size: base,
        copies,
        mutation_rate: rate,
        alphabet,
        seed,
        ..Default::default()
    })
}

/// Twenty generated corpora with mixed sizes, alphabets and mutation
/// rates, plus the 21-character Fibonacci word.
fn test_texts() -> Vec<Vec<u8>> {
    let rates = [0.0, 0.0001, 0.001, 0.01, 0.05];
    let mut out = Vec::new();
    for i in 0..EXTRACT_CORPORA {
        let n = EXTRACT_MAX_N >> (i % 5 * 2);
        let copies = [4, 8, 16, 32][i % 4];
        let alphabet = [4, 2, 26, 4, 4][i / 4 % 5];
        out.push(corpus(n / copies, copies, rates[i % 5], alphabet, i as u64));
    }
    out.push(fibonacci_word(8));
    out
}

fn c1_extraction(cases: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let per = EXTRACT_QUERIES / cases.len() + 1;
    let mut done = 0;
    let mut out = Vec::new();
    for c in cases {
        let n = c.text.len();
        for _ in 0..per {
            let len = rng.random_range(1..=n.min(4096));
            let f = rng.random_range(1..=n + 1 - len);
            out.clear();
            if let Err(e) = c.index.graph.extract_into(f, f + len - 1, &mut out, &mut Visits::new()) {
                return Outcome::Fail(format!("n={n} [{f}, {}]: {e}", f + len - 1));
            }
            if out != c.text[f - 1..f + len - 1] {
                return Outcome::Fail(format!("n={n} [{f}, {}] differs", f + len - 1));
            }
            done += 1;
        }
    }
    Outcome::Pass(format!("{done} queries on {} texts exact", cases.len()))
}

fn brute_parse(t: &[u8]) -> Vec<(usize, Option<usize>)> {
    let n = t.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut best = (0, 0);
        for j in 0..i {
            let mut l = 0;
            while i + l < n && j + l < i && t[j + l] == t[i + l] {
                l += 1;
            }
            if l > best.0 {
                best = (l, j);
            }
        }
        if best.0 == 0 {
            out.push((1, None));
            i += 1;
        } else {
            out.push((best.0, Some(best.1 + 1)));
            i += best.0;
        }
    }
    out
}

fn c2_lz77() -> Outcome {
    let fib = lz77::parse(&fibonacci_word(8)).unwrap();
    if fib.len() != FIB8_Z {
        return Outcome::Fail(format!("Fibonacci-8 z = {}, expected {FIB8_Z}", fib.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in 0..LZ_STRINGS {
        let alphabet = [2u8, 4, 26][s % 3];
        let n = rng.random_range(1..=LZ_MAX_N);
        let t: Vec<u8> = (0..n).map(|_| b'a' + rng.random_range(0..alphabet)).collect();
        let got: Vec<(usize, Option<usize>)> = lz77::parse(&t)
            .unwrap()
            .iter()
            .map(|p| match p.kind {
                PhraseKind::Literal(_) => (1, None),
                PhraseKind::Copy { src } => (p.len, Some(src)),
            })
            .collect();
        if got != brute_parse(&t) {
            return Outcome::Fail(format!("string {s} (alphabet {alphabet}, n {n}) differs"));
        }
    }
    Outcome::Pass(format!("{LZ_STRINGS} strings match the oracle, Fibonacci-8 z={FIB8_Z}"))
}

fn c3_structure(cases: &[Case]) -> Outcome {
    let mut levels = 0;
    let mut worst = 0.0f64;
    for c in cases {
        let ti = TextIndex::new(&c.text).unwrap();
        // validate_with checks the internal-node bound and that every
        // internal first occurrence touches a boundary or position 1
        let report = match validate_with(&c.index.graph, &c.text, &ti, &c.index.phrases) {
            Ok(r) => r,
            Err(e) => return Outcome::Fail(format!("n={}: {e}", c.text.len())),
        };
        for l in &report.levels {
            if l.internal > INTERNAL_PER_PHRASE * report.z {
                return Outcome::Fail(format!("depth {} has {} internal, z={}", l.depth, l.internal, report.z));
            }
            worst = worst.max(l.internal as f64 / report.z as f64);
            levels += 1;
        }
    }
    Outcome::Pass(format!("{levels} levels checked, max internal/z = {worst:.3}"))
}

fn graph_only_bytes(index: &BlockIndex) -> usize {
    let s = format::section_sizes(&index.graph, &index.phrases, &index.bookmarks);
    s.header + s.levels + s.truncated_text + s.checksum
}

fn c4_compression() -> Outcome {
    let size = |copies| {
        let text = generate(&CorpusConfig {
            base_size: COMPRESS_BASE,
            copies,
            subs_per_copy: COMPRESS_SUBS,
            seed: 4,
            ..Default::default()
        });
        let index = BlockIndex::build(&text, BuildConfig::default(), false).unwrap();
        (text.len(), format::index_to_bytes(&index).len(), index.z())
    };
    let (raw, bytes, z) = size(COMPRESS_COPIES);
    let (raw4, bytes4, z4) = size(COMPRESS_COPIES_LARGE);
    let ratio = bytes as f64 / raw as f64;
    let growth = bytes4 as f64 / bytes as f64;
    let detail = format!(
        "{COMPRESS_COPIES} copies: {bytes} / {raw} = {ratio:.3} (z={z}); \
         {COMPRESS_COPIES_LARGE} copies: {bytes4} / {raw4} (z={z4}), growth {growth:.3}"
    );
    if ratio <= COMPRESS_MAX_RATIO && growth <= COMPRESS_MAX_GROWTH {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn c5_einstein() -> Outcome {
    let path = std::env::var_os(EINSTEIN_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/einstein.en.txt"));
    let Ok(text) = std::fs::read(&path) else {
        return Outcome::Skip(format!("corpus not found (set {EINSTEIN_ENV})"));
    };
    let index = match BlockIndex::build(&text, BuildConfig::default(), false) {
        Ok(i) => i,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let bytes = graph_only_bytes(&index) as f64;
    let dev = (bytes - EINSTEIN_GRAPH_BYTES) / EINSTEIN_GRAPH_BYTES;
    let detail = format!("graph {bytes} bytes vs {EINSTEIN_GRAPH_BYTES}, deviation {:+.1}%", dev * 100.0);
    if dev.abs() <= EINSTEIN_TOLERANCE {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn sellers_oracle(t: &[u8], p: &[u8], k: usize) -> Vec<(usize, usize)> {
    let m = p.len();
    let mut col: Vec<usize> = (0..=m).collect();
    let mut out = Vec::new();
    for (j, &c) in t.iter().enumerate() {
        let mut diag = col[0];
        col[0] = 0;
        for i in 1..=m {
            let up = col[i];
            col[i] = (diag + usize::from(p[i - 1] != c)).min(up + 1).min(col[i - 1] + 1);
            diag = up;
        }
        if col[m] <= k {
            out.push((j + 1, col[m]));
        }
    }
    out
}

/// Runs criteria 6 and 8 together: every search is compared with the
/// oracle and its extraction counter is checked against the budget.
fn c6_c8_search() -> (Outcome, Outcome) {
    let texts: Vec<Vec<u8>> = [(0.0, 4), (0.001, 4), (0.01, 4), (0.02, 2), (0.005, 26)]
        .into_iter()
        .enumerate()
        .map(|(i, (rate, a))| corpus(SEARCH_MAX_N / 10, 10, rate, a, 60 + i as u64))
        .collect();
    let indexes: Vec<BlockIndex> = texts
        .iter()
        .map(|t| BlockIndex::build(t, BuildConfig::default(), true).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut searches = 0;
    let mut worst_budget = 0.0f64;
    let mut budget_fail = None;
    for k in 0..=SEARCH_MAX_K {
        for q in 0..SEARCH_PATTERNS_PER_CLASS {
            let which = q % texts.len();
            let (t, idx) = (&texts[which], &indexes[which]);
            let m = rng.random_range(SEARCH_M.0.max(k)..=SEARCH_M.1);
            let p: Vec<u8> = if rng.random_bool(0.8) {
                let i = rng.random_range(0..t.len() - m);
                let mut p = t[i..i + m].to_vec();
                for _ in 0..rng.random_range(0..=k) {
                    let j = rng.random_range(0..m);
                    p[j] = t[rng.random_range(0..t.len())];
                }
                p
            } else {
                (0..m).map(|_| t[rng.random_range(0..t.len())]).collect()
            };
            let mut stats = SearchStats::default();
            let got = match search_with(&idx.graph, &idx.bookmarks, &idx.phrases, &p, k, Engine::default(), &mut stats) {
                Ok(g) => g,
                Err(e) => {
                    let f = Outcome::Fail(format!("k={k}: {e}"));
                    return (f, Outcome::Fail("search failed".into()));
                }
            };
            let pairs: Vec<(usize, usize)> = got.iter().map(|x| (x.end, x.dist)).collect();
            if pairs != sellers_oracle(t, &p, k) {
                let f = Outcome::Fail(format!("text {which}, m={m}, k={k}: output differs from the oracle"));
                return (f, Outcome::Fail("aborted with criterion 6".into()));
            }
            let budget = extraction_budget(m, k, idx.z());
            worst_budget = worst_budget.max(stats.extracted_chars as f64 / budget as f64);
            if stats.extracted_chars > budget && budget_fail.is_none() {
                budget_fail = Some(format!("m={m}, k={k}: extracted {} > {budget}", stats.extracted_chars));
            }
            searches += 1;
        }
    }
    let c6 = Outcome::Pass(format!("{searches} searches over k=0..={SEARCH_MAX_K} equal the oracle"));
    let c8 = match budget_fail {
        Some(f) => Outcome::Fail(f),
        None => Outcome::Pass(format!("{searches} searches, max extracted/budget = {worst_budget:.3}")),
    };
    (c6, c8)
}

fn c7_locality() -> Outcome {
    let text = corpus(LOCALITY_N / 16, 16, 0.001, 4, 7);
    let n = text.len();
    let index = BlockIndex::build(&text, BuildConfig::default(), true).unwrap();
    let bms = index.bookmarks.as_slice();
    let root_slack = VISITS_SLACK * log2_ceil(n);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    let mut summary = Vec::new();
    let mut len = 1;
    while len <= LOCALITY_MAX_LEN {
        let (mut worst_bm, mut worst_root) = (0, 0);
        for _ in 0..LOCALITY_QUERIES {
            let bm = &bms[rng.random_range(0..bms.len())];
            let lo = (bm.pos + 1).saturating_sub(len).max(1);
            let f = rng.random_range(lo..=bm.pos.min(n + 1 - len));
            let l = f + len - 1;
            let mut v = Visits::new();
            out.clear();
            extract_with_bookmark_into(&index.graph, bm, f, l, &mut out, &mut v).unwrap();
            if out != text[f - 1..l] {
                return Outcome::Fail(format!("bookmarked [{f}, {l}] differs"));
            }
            worst_bm = worst_bm.max(v.count);
            let mut v = Visits::new();
            out.clear();
            index.graph.extract_into(f, l, &mut out, &mut v).unwrap();
            worst_root = worst_root.max(v.count);
        }
        if worst_bm > VISITS_PER_CHAR * len + VISITS_SLACK {
            return Outcome::Fail(format!("L={len}: {worst_bm} bookmarked visits"));
        }
        if worst_root > VISITS_PER_CHAR * len + root_slack {
            return Outcome::Fail(format!("L={len}: {worst_root} root visits"));
        }
        summary.push(format!("{len}:{worst_bm}/{worst_root}"));
        len *= 2;
    }
    Outcome::Pass(format!("n={n}, max visits bookmark/root per L: {}", summary.join(" ")))
}

fn c9_round_trip(cases: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for c in cases {
        let bytes = format::index_to_bytes(&c.index);
        let back = match format::from_bytes(&bytes) {
            Ok(b) => b,
            Err(e) => return Outcome::Fail(format!("n={}: {e}", c.text.len())),
        };
        if back != c.index || format::index_to_bytes(&back) != bytes {
            return Outcome::Fail(format!("n={}: loaded index differs", c.text.len()));
        }
        let n = c.text.len();
        for _ in 0..200 {
            let f = rng.random_range(1..=n);
            let l = rng.random_range(f..=n.min(f + 500));
            if back.graph.extract(f, l).ok() != c.index.graph.extract(f, l).ok() {
                return Outcome::Fail(format!("n={n}: extract({f}, {l}) differs after load"));
            }
        }
        let i = rng.random_range(0..n.saturating_sub(12).max(1));
        let p = &c.text[i..(i + 12).min(n)];
        if back.search(p, 1) != c.index.search(p, 1) {
            return Outcome::Fail(format!("n={n}: search differs after load"));
        }
    }

    let bytes = format::index_to_bytes(&cases[cases.len() - 1].index);
    let mut bad_magic = bytes.clone();
    bad_magic[1] = b'?';
    let mut bad_version = bytes.clone();
    bad_version[4] = 0xEE;
    let mut flipped = bytes.clone();
    flipped[bytes.len() / 2] ^= 1;
    let checks = [
        ("magic", matches!(format::from_bytes(&bad_magic), Err(FormatError::BadMagic))),
        ("version", matches!(format::from_bytes(&bad_version), Err(FormatError::UnsupportedVersion(_)))),
        ("truncation", matches!(format::from_bytes(&bytes[..bytes.len() - 7]), Err(FormatError::Truncated(_)))),
        ("bit flip", matches!(format::from_bytes(&flipped), Err(FormatError::ChecksumMismatch { .. }))),
    ];
    if let Some((what, _)) = checks.iter().find(|c| !c.1) {
        return Outcome::Fail(format!("corrupted {what} not reported with its error"));
    }
    Outcome::Pass(format!("{} indexes round-trip, 4 corruption kinds rejected", cases.len()))
}

/// Prints one criterion line; returns whether it failed.
fn report(id: usize, name: &str, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let (tag, detail) = match &outcome {
        Outcome::Pass(d) => ("PASS", d),
        Outcome::Fail(d) => ("FAIL", d),
        Outcome::Skip(d) => ("SKIP", d),
    };
    println!("criterion {id} {tag} {name} ({secs:.1}s): {detail}");
    matches!(outcome, Outcome::Fail(_))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cases: Vec<Case> = test_texts()
        .into_iter()
        .map(|text| {
            let index = BlockIndex::build(&text, BuildConfig::default(), true).expect("test corpus builds");
            Case { text, index }
        })
        .collect();
    println!("built {} test indexes in {:.1}s", cases.len(), started.elapsed().as_secs_f64());

    let mut failed = false;
    let t = Instant::now();
    failed |= report(1, "extraction exactness", t, c1_extraction(&cases));
    let t = Instant::now();
    failed |= report(2, "LZ77 oracle", t, c2_lz77());
    let t = Instant::now();
    failed |= report(3, "internal-node bound", t, c3_structure(&cases));
    let t = Instant::now();
    failed |= report(4, "compression", t, c4_compression());
    let t = Instant::now();
    failed |= report(5, "einstein size", t, c5_einstein());
    let t = Instant::now();
    let (c6, c8) = c6_c8_search();
    failed |= report(6, "search oracle", t, c6);
    let t = Instant::now();
    failed |= report(7, "bookmark locality", t, c7_locality());
    failed |= report(8, "search extraction budget", Instant::now(), c8);
    let t = Instant::now();
    failed |= report(9, "round trip", t, c9_round_trip(&cases));

    println!("total {:.1}s", started.elapsed().as_secs_f64());
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
