//! Synthetic repetitive corpora: a random base followed by mutated copies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub base_size: usize,
    /// Total number of copies, the base included.
    pub copies: usize,
    /// Per-position substitution probability in each copy.
    pub mutation_rate: f64,
    /// Per-position probability of an insertion or deletion in each copy.
    pub indel_rate: f64,
    /// Exact number of substitutions per copy, applied on top of the rate.
    pub subs_per_copy: usize,
    pub alphabet: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            base_size: 1 << 16,
            copies: 16,
            mutation_rate: 0.0,
            indel_rate: 0.0,
            subs_per_copy: 0,
            alphabet: 4,
            seed: 0,
        }
    }
}

/// Symbols used for an alphabet of the given size: `ACGT` for 4, lowercase
/// letters up to 26, raw byte values beyond.
pub fn symbols(alphabet: usize) -> Vec<u8> {
    match alphabet {
        4 => b"ACGT".to_vec(),
        1..=26 => (b'a'..b'a' + alphabet as u8).collect(),
        _ => (0..alphabet.min(256)).map(|c| c as u8).collect(),
    }
}

fn substitute(rng: &mut ChaCha8Rng, syms: &[u8], c: u8) -> u8 {
    if syms.len() < 2 {
        return c;
    }
    loop {
        let s = syms[rng.random_range(0..syms.len())];
        if s != c {
            return s;
        }
    }
}

/// Generates the corpus; identical configurations give identical bytes.
pub fn generate(cfg: &CorpusConfig) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let syms = symbols(cfg.alphabet.max(1));
    let base: Vec<u8> = (0..cfg.base_size)
        .map(|_| syms[rng.random_range(0..syms.len())])
        .collect();
    let mut out = Vec::with_capacity(cfg.base_size * cfg.copies.max(1));
    out.extend_from_slice(&base);
    for _ in 1..cfg.copies {
        let mut copy = Vec::with_capacity(base.len() + 16);
        for &c in &base {
            if cfg.indel_rate > 0.0 && rng.random_bool(cfg.indel_rate.min(1.0)) {
                if rng.random_bool(0.5) {
                    continue;
                }
                copy.push(syms[rng.random_range(0..syms.len())]);
            }
            let c = if cfg.mutation_rate > 0.0 && rng.random_bool(cfg.mutation_rate.min(1.0)) {
                substitute(&mut rng, &syms, c)
            } else {
                c
            };
            copy.push(c);
        }
        for _ in 0..cfg.subs_per_copy {
            if copy.is_empty() {
                break;
            }
            let p = rng.random_range(0..copy.len());
            copy[p] = substitute(&mut rng, &syms, copy[p]);
        }
        out.extend_from_slice(&copy);
    }
    out
}

/// Fibonacci word of index `k`: `w1 = b`, `w2 = a`, `w_k = w_{k-1} w_{k-2}`.
/// Its length is the `k`-th Fibonacci number.
pub fn fibonacci_word(k: usize) -> Vec<u8> {
    let (mut prev, mut cur) = (b"b".to_vec(), b"a".to_vec());
    if k <= 1 {
        return prev;
    }
    for _ in 2..k {
        let mut next = cur.clone();
        next.extend_from_slice(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}
