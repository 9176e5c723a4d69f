//! Suffix-array based first-occurrence queries.
//!
//! `first_occurrence(q, len)` returns the leftmost start of `text[q..q+len]`.
//! The suffixes sharing that prefix form a contiguous suffix-array interval
//! delimited by LCP values below `len`; the answer is the minimum suffix-array
//! entry in that interval. Both steps use the block-plus-sparse-table
//! structure in [`RangeMin`], so a query costs `O(log n)` plus two scans of
//! at most one block.

use thiserror::Error;

const BLOCK: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextIndexError {
    #[error("text of {0} bytes exceeds the supported maximum of 2^31 - 1")]
    TooLong(usize),
    #[error("suffix array construction failed: {0}")]
    Construction(String),
}

/// Range-minimum support over a `u32` slice that the caller keeps.
#[derive(Debug, Clone, Default)]
pub struct RangeMin {
    /// `table[k][i]` is the minimum of blocks `i..i + 2^k`.
    table: Vec<Vec<u32>>,
    len: usize,
}

impl RangeMin {
    pub fn new(data: &[u32]) -> Self {
        let mins: Vec<u32> = data
            .chunks(BLOCK)
            .map(|c| *c.iter().min().unwrap())
            .collect();
        let nb = mins.len();
        let mut table = vec![mins];
        let mut k = 1;
        while (1usize << k) <= nb {
            let prev = &table[k - 1];
            let half = 1usize << (k - 1);
            let next: Vec<u32> = (0..=nb - (1 << k))
                .map(|i| prev[i].min(prev[i + half]))
                .collect();
            table.push(next);
            k += 1;
        }
        RangeMin {
            table,
            len: data.len(),
        }
    }

    fn blocks(&self) -> usize {
        self.table.first().map_or(0, |t| t.len())
    }

    /// Minimum of `data[lo..=hi]`.
    pub fn min(&self, data: &[u32], lo: usize, hi: usize) -> u32 {
        debug_assert!(lo <= hi && hi < self.len);
        let (bl, bh) = (lo / BLOCK, hi / BLOCK);
        if bh <= bl + 1 {
            return *data[lo..=hi].iter().min().unwrap();
        }
        let mut m = *data[lo..(bl + 1) * BLOCK].iter().min().unwrap();
        m = m.min(*data[bh * BLOCK..=hi].iter().min().unwrap());
        let (a, b) = (bl + 1, bh - 1);
        let k = (usize::BITS - 1 - (b - a + 1).leading_zeros()) as usize;
        m.min(self.table[k][a]).min(self.table[k][b + 1 - (1 << k)])
    }

    /// Largest `x <= r` with `data[x] < thr`.
    pub fn prev_less(&self, data: &[u32], r: usize, thr: u32) -> Option<usize> {
        let b = r / BLOCK;
        if let Some(x) = (b * BLOCK..=r).rev().find(|&x| data[x] < thr) {
            return Some(x);
        }
        let mut pos = b;
        for k in (0..self.table.len()).rev() {
            let step = 1usize << k;
            if pos >= step && self.table[k][pos - step] >= thr {
                pos -= step;
            }
        }
        if pos == 0 {
            return None;
        }
        let blk = pos - 1;
        (blk * BLOCK..(blk + 1) * BLOCK).rev().find(|&x| data[x] < thr)
    }

    /// Smallest `y >= r` with `data[y] < thr`.
    pub fn next_less(&self, data: &[u32], r: usize, thr: u32) -> Option<usize> {
        if r >= self.len {
            return None;
        }
        let b = r / BLOCK;
        let block_end = ((b + 1) * BLOCK).min(self.len);
        if let Some(y) = (r..block_end).find(|&y| data[y] < thr) {
            return Some(y);
        }
        let nb = self.blocks();
        let mut pos = b + 1;
        for k in (0..self.table.len()).rev() {
            let step = 1usize << k;
            if pos + step <= nb && self.table[k][pos] >= thr {
                pos += step;
            }
        }
        if pos >= nb {
            return None;
        }
        (pos * BLOCK..((pos + 1) * BLOCK).min(self.len)).find(|&y| data[y] < thr)
    }
}

/// Suffix array, inverse suffix array and LCP array of a text, with
/// range-minimum support for first-occurrence queries.
pub struct TextIndex {
    sa: Vec<u32>,
    isa: Vec<u32>,
    lcp: Vec<u32>,
    sa_min: RangeMin,
    lcp_min: RangeMin,
}

impl std::fmt::Debug for TextIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TextIndex").field("n", &self.sa.len()).finish()
    }
}

impl TextIndex {
    pub fn new(text: &[u8]) -> Result<Self, TextIndexError> {
        let n = text.len();
        if n >= i32::MAX as usize {
            return Err(TextIndexError::TooLong(n));
        }
        let sa: Vec<u32> = if n == 0 {
            Vec::new()
        } else {
            libsais::SuffixArrayConstruction::for_text(text)
                .in_owned_buffer()
                .single_threaded()
                .run()
                .map_err(|e| TextIndexError::Construction(format!("{e:?}")))?
                .into_vec()
                .into_iter()
                .map(|x: i32| x as u32)
                .collect()
        };
        let mut isa = vec![0u32; n];
        for (r, &p) in sa.iter().enumerate() {
            isa[p as usize] = r as u32;
        }
        let lcp = kasai(text, &sa, &isa);
        let sa_min = RangeMin::new(&sa);
        let lcp_min = RangeMin::new(&lcp);
        Ok(TextIndex {
            sa,
            isa,
            lcp,
            sa_min,
            lcp_min,
        })
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    pub fn suffix_array(&self) -> &[u32] {
        &self.sa
    }

    pub fn lcp(&self) -> &[u32] {
        &self.lcp
    }

    /// Leftmost 0-based start of `text[q..q + len]`. Requires `len >= 1` and
    /// `q + len <= n`.
    pub fn first_occurrence(&self, q: usize, len: usize) -> usize {
        debug_assert!(len >= 1 && q + len <= self.len());
        let thr = len.min(u32::MAX as usize) as u32;
        let r = self.isa[q] as usize;
        let lo = self
            .lcp_min
            .prev_less(&self.lcp, r, thr)
            .expect("lcp[0] is zero");
        let hi = self
            .lcp_min
            .next_less(&self.lcp, r + 1, thr)
            .map_or(self.len() - 1, |y| y - 1);
        self.sa_min.min(&self.sa, lo, hi) as usize
    }
}

/// `lcp[r]` is the longest common prefix of suffixes `sa[r-1]` and `sa[r]`;
/// `lcp[0] = 0`.
fn kasai(text: &[u8], sa: &[u32], isa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = isa[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && text[i + h] == text[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}
