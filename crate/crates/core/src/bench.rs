//! Random-extraction timing.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bookmarks::{extract_with_bookmark_into, Bookmarks};
use crate::graph::{BlockGraph, Visits};

/// Timing summary for one query length. Times are microseconds per
/// extracted character.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub length: usize,
    pub mean: f64,
    pub p50: f64,
    pub p99: f64,
    pub chars_per_sec: f64,
}

pub const CSV_HEADER: &str = "length,mean,p50,p99,chars_per_sec";

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let i = ((sorted.len() as f64 - 1.0) * q).round() as usize;
    sorted[i.min(sorted.len() - 1)]
}

/// Runs `queries` random extractions for each length. With `bookmarks`,
/// every query touches a random bookmark and goes through it.
pub fn run(
    graph: &BlockGraph,
    bookmarks: Option<&Bookmarks>,
    queries: usize,
    lengths: &[usize],
    seed: u64,
) -> Vec<BenchRow> {
    let n = graph.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(64);
    let mut rows = Vec::new();
    for &len in lengths {
        let len = len.clamp(1, n);
        let mut times = Vec::with_capacity(queries);
        let mut total_chars = 0usize;
        let started = Instant::now();
        for _ in 0..queries.max(1) {
            out.clear();
            let t0 = Instant::now();
            match bookmarks.filter(|b| !b.is_empty()) {
                Some(bms) => {
                    let bm = &bms.as_slice()[rng.random_range(0..bms.len())];
                    let lo = (bm.pos + 1).saturating_sub(len).max(1);
                    let hi = bm.pos.min(n + 1 - len);
                    let f = rng.random_range(lo..=hi.max(lo));
                    extract_with_bookmark_into(graph, bm, f, f + len - 1, &mut out, &mut Visits::new())
                        .expect("interval touches the bookmark");
                }
                None => {
                    let f = rng.random_range(1..=n + 1 - len);
                    graph
                        .extract_into(f, f + len - 1, &mut out, &mut Visits::new())
                        .expect("interval is in range");
                }
            }
            times.push(t0.elapsed().as_secs_f64() * 1e6 / len as f64);
            total_chars += out.len();
        }
        let secs = started.elapsed().as_secs_f64().max(1e-12);
        times.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            length: len,
            mean: times.iter().sum::<f64>() / times.len() as f64,
            p50: percentile(&times, 0.5),
            p99: percentile(&times, 0.99),
            chars_per_sec: total_chars as f64 / secs,
        });
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{:.6},{:.6},{:.6},{:.1}", r.length, r.mean, r.p50, r.p99, r.chars_per_sec)?;
    }
    Ok(())
}
