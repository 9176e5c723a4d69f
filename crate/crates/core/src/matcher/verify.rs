//! Approximate-match verification over one text window.
//!
//! All engines report, for every end position `e` of `text`, the smallest
//! edit distance between `pattern` and a substring ending at `e`, if it is at
//! most `k`, together with the largest start achieving it. Output is in local
//! 0-based coordinates and sorted by end.

/// A match in window coordinates: `text[start..=end]` is at distance `dist`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalMatch {
    pub end: usize,
    pub dist: usize,
    pub start: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Column DP over (cost, start) pairs.
    Reference,
    /// Diagonal transition with direct character comparison.
    #[default]
    DiagonalTransition,
}

pub fn verify(engine: Engine, text: &[u8], pattern: &[u8], k: usize) -> Vec<LocalMatch> {
    if k == 0 {
        return exact(text, pattern);
    }
    match engine {
        Engine::Reference => sellers(text, pattern, k),
        Engine::DiagonalTransition => diagonal(text, pattern, k),
    }
}

/// Exact occurrences.
pub fn exact(text: &[u8], pattern: &[u8]) -> Vec<LocalMatch> {
    let m = pattern.len();
    if m == 0 || m > text.len() {
        return Vec::new();
    }
    text.windows(m)
        .enumerate()
        .filter(|(_, w)| *w == pattern)
        .map(|(s, _)| LocalMatch {
            end: s + m - 1,
            dist: 0,
            start: s,
        })
        .collect()
}

/// Reference engine: one DP column per text character. Each cell holds the
/// lexicographically best (cost, -start) pair, so the winning start is the
/// largest one among minimum-cost alignments.
pub fn sellers(text: &[u8], pattern: &[u8], k: usize) -> Vec<LocalMatch> {
    let m = pattern.len();
    let mut col: Vec<(usize, usize)> = (0..=m).map(|i| (i, 0)).collect();
    let better = |a: (usize, usize), b: (usize, usize)| {
        if a.0 != b.0 {
            a.0 < b.0
        } else {
            a.1 > b.1
        }
    };
    let mut out = Vec::new();
    for (j, &c) in text.iter().enumerate() {
        let mut diag = col[0];
        col[0] = (0, j + 1);
        for i in 1..=m {
            let up = col[i];
            let mut best = (diag.0 + usize::from(pattern[i - 1] != c), diag.1);
            let del = (up.0 + 1, up.1);
            if better(del, best) {
                best = del;
            }
            let ins = (col[i - 1].0 + 1, col[i - 1].1);
            if better(ins, best) {
                best = ins;
            }
            diag = up;
            col[i] = best;
        }
        let (cost, start) = col[m];
        if cost <= k {
            // an empty witness ties with the single character ending here
            out.push(LocalMatch {
                end: j,
                dist: cost,
                start: start.min(j),
            });
        }
    }
    out
}

/// Diagonal-transition engine. `row[d]` is the furthest pattern row reached
/// on diagonal `d` (text column minus pattern row) with the current number of
/// errors; each round extends every diagonal by direct comparison.
pub fn diagonal(text: &[u8], pattern: &[u8], k: usize) -> Vec<LocalMatch> {
    const NEG: i64 = i64::MIN / 4;
    let n = text.len() as i64;
    let m = pattern.len() as i64;
    let k_i = k as i64;
    let off = k_i + 1;
    let size = (n + k_i + 3) as usize;
    let idx = |d: i64| (d + off) as usize;

    let mut prev = vec![NEG; size];
    for d in 0..=n {
        prev[idx(d)] = -1;
    }
    let mut cur = vec![NEG; size];
    let mut best: Vec<Option<usize>> = vec![None; text.len()];

    for e in 0..=k_i {
        cur.fill(NEG);
        for d in -e..=n {
            let mut row = (prev[idx(d)] + 1)
                .max(prev[idx(d) - 1])
                .max(prev[idx(d) + 1] + 1);
            if row < 0 {
                continue;
            }
            row = row.min(m).min(n - d);
            while row < m && row + d < n && pattern[row as usize] == text[(row + d) as usize] {
                row += 1;
            }
            cur[idx(d)] = row;
            if row == m {
                let j = m + d;
                if j >= 1 && j <= n && best[(j - 1) as usize].is_none() {
                    best[(j - 1) as usize] = Some(e as usize);
                }
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    best.iter()
        .enumerate()
        .filter_map(|(end, d)| {
            d.map(|dist| LocalMatch {
                end,
                dist,
                start: shortest_witness(text, pattern, end, dist),
            })
        })
        .collect()
}

/// Largest start `f <= end` with `edit(text[f..=end], pattern) == dist`,
/// given that `dist` is the minimum over all starts.
pub fn shortest_witness(text: &[u8], pattern: &[u8], end: usize, dist: usize) -> usize {
    let m = pattern.len();
    // col[i]: distance between the last i pattern characters and the last
    // `len` window characters
    let mut col: Vec<usize> = (0..=m).collect();
    for len in 1..=end + 1 {
        let c = text[end + 1 - len];
        let mut diag = col[0];
        col[0] = len;
        for i in 1..=m {
            let up = col[i];
            col[i] = (diag + usize::from(pattern[m - i] != c))
                .min(up + 1)
                .min(col[i - 1] + 1);
            diag = up;
        }
        if col[m] == dist {
            return end + 1 - len;
        }
    }
    unreachable!("dist is achieved by some start")
}
