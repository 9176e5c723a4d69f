//! Plain bitvector with constant-time rank and sampled select.
//!
//! Layout of the rank directory:
//!
//! - one absolute 1-count per 512-bit superblock (`u64`),
//! - one 1-count relative to the enclosing superblock per 64-bit block (`u16`).
//!
//! `rank` is therefore a superblock lookup, a block lookup and a single
//! masked popcount. `select` starts from a sample (every 8192nd occurrence of
//! the bit), binary-searches the superblocks up to the next sample and then
//! scans at most eight words.
//!
//! Positions are 0-based and `rank` is exclusive: `rank1(i)` counts the ones
//! in `[0, i)`.

use thiserror::Error;

const WORD_BITS: usize = 64;
const SUPERBLOCK_BITS: usize = 512;
const WORDS_PER_SUPERBLOCK: usize = SUPERBLOCK_BITS / WORD_BITS;
const SELECT_SAMPLE: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitvectorError {
    #[error("position {pos} out of range for bitvector of length {len}")]
    OutOfRange { pos: usize, len: usize },
    #[error("no such bit: requested occurrence {ordinal} of {bit}, only {available} present")]
    NoSuchBit {
        bit: u8,
        ordinal: usize,
        available: usize,
    },
}

/// Immutable bitvector with rank/select support.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitvector {
    words: Vec<u64>,
    len: usize,
    superblocks: Vec<u64>,
    blocks: Vec<u16>,
    select1_samples: Vec<u32>,
    select0_samples: Vec<u32>,
    ones: usize,
}

impl std::fmt::Debug for Bitvector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bitvector")
            .field("len", &self.len)
            .field("ones", &self.ones)
            .finish()
    }
}

impl Default for Bitvector {
    fn default() -> Self {
        Self::from_words(Vec::new(), 0)
    }
}

impl Bitvector {
    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut builder = BitvectorBuilder::new();
        for b in bits {
            builder.push(b);
        }
        builder.finish()
    }

    /// Parses a string of `0`/`1` characters; any other character is ignored.
    pub fn from_bit_str(s: &str) -> Self {
        Self::from_bools(s.bytes().filter_map(|c| match c {
            b'0' => Some(false),
            b'1' => Some(true),
            _ => None,
        }))
    }

    /// Builds from raw little-endian words. Bits past `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        let needed = len.div_ceil(WORD_BITS);
        words.resize(needed, 0);
        if !len.is_multiple_of(WORD_BITS) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % WORD_BITS)) - 1;
            }
        }
        let mut bv = Bitvector {
            words,
            len,
            superblocks: Vec::new(),
            blocks: Vec::new(),
            select1_samples: Vec::new(),
            select0_samples: Vec::new(),
            ones: 0,
        };
        bv.build_directory();
        bv
    }

    fn build_directory(&mut self) {
        let nwords = self.words.len();
        self.superblocks = Vec::with_capacity(nwords / WORDS_PER_SUPERBLOCK + 1);
        self.blocks = Vec::with_capacity(nwords);
        self.select1_samples.clear();
        self.select0_samples.clear();

        let mut total = 0usize;
        let mut in_super = 0usize;
        for (w, &word) in self.words.iter().enumerate() {
            if w % WORDS_PER_SUPERBLOCK == 0 {
                self.superblocks.push(total as u64);
                in_super = 0;
            }
            self.blocks.push(in_super as u16);
            let ones = word.count_ones() as usize;
            let bits_here = (self.len - w * WORD_BITS).min(WORD_BITS);
            let zeros = bits_here - ones;

            // record samples for the (k * SELECT_SAMPLE + 1)-th occurrence
            let zeros_before = w * WORD_BITS - total;
            let next1 = self.select1_samples.len() * SELECT_SAMPLE + 1;
            if total < next1 && total + ones >= next1 {
                self.select1_samples.push(w as u32);
            }
            let next0 = self.select0_samples.len() * SELECT_SAMPLE + 1;
            if zeros_before < next0 && zeros_before + zeros >= next0 {
                self.select0_samples.push(w as u32);
            }

            total += ones;
            in_super += ones;
        }
        self.superblocks.push(total as u64);
        self.ones = total;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn access(&self, i: usize) -> Result<bool, BitvectorError> {
        if i >= self.len {
            return Err(BitvectorError::OutOfRange {
                pos: i,
                len: self.len,
            });
        }
        Ok(self.get(i))
    }

    /// Unchecked in release builds; callers guarantee `i < len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn rank1_unchecked(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / WORD_BITS;
        if w == self.words.len() {
            return self.ones;
        }
        let base = self.superblocks[w / WORDS_PER_SUPERBLOCK] as usize;
        let rel = self.blocks[w] as usize;
        let bit = i % WORD_BITS;
        let masked = if bit == 0 {
            0
        } else {
            self.words[w] & ((1u64 << bit) - 1)
        };
        base + rel + masked.count_ones() as usize
    }

    #[inline]
    pub fn rank0_unchecked(&self, i: usize) -> usize {
        i - self.rank1_unchecked(i)
    }

    pub fn rank(&self, bit: bool, i: usize) -> Result<usize, BitvectorError> {
        if i > self.len {
            return Err(BitvectorError::OutOfRange {
                pos: i,
                len: self.len,
            });
        }
        let ones = self.rank1_unchecked(i);
        Ok(if bit { ones } else { i - ones })
    }

    pub fn rank1(&self, i: usize) -> Result<usize, BitvectorError> {
        self.rank(true, i)
    }

    pub fn rank0(&self, i: usize) -> Result<usize, BitvectorError> {
        self.rank(false, i)
    }

    /// Position of the `j`-th (1-based) occurrence of `bit`.
    pub fn select(&self, bit: bool, j: usize) -> Result<usize, BitvectorError> {
        let available = if bit { self.ones } else { self.len - self.ones };
        if j == 0 || j > available {
            return Err(BitvectorError::NoSuchBit {
                bit: bit as u8,
                ordinal: j,
                available,
            });
        }
        Ok(self.select_unchecked(bit, j))
    }

    pub fn select1(&self, j: usize) -> Result<usize, BitvectorError> {
        self.select(true, j)
    }

    pub fn select0(&self, j: usize) -> Result<usize, BitvectorError> {
        self.select(false, j)
    }

    fn ones_before_super(&self, s: usize, bit: bool) -> usize {
        let ones = self.superblocks[s] as usize;
        if bit {
            ones
        } else {
            (s * SUPERBLOCK_BITS).min(self.len) - ones
        }
    }

    fn select_unchecked(&self, bit: bool, j: usize) -> usize {
        let samples = if bit {
            &self.select1_samples
        } else {
            &self.select0_samples
        };
        let sample = (j - 1) / SELECT_SAMPLE;
        let lo_word = samples[sample] as usize;
        let hi_word = samples
            .get(sample + 1)
            .map(|&w| w as usize)
            .unwrap_or(self.words.len() - 1);

        // last superblock in [lo, hi] whose prefix count is < j
        let mut lo = lo_word / WORDS_PER_SUPERBLOCK;
        let mut hi = hi_word / WORDS_PER_SUPERBLOCK;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.ones_before_super(mid, bit) < j {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let mut remaining = j - self.ones_before_super(lo, bit);
        let mut w = lo * WORDS_PER_SUPERBLOCK;
        loop {
            let word = if bit { self.words[w] } else { !self.words[w] };
            let cnt = word.count_ones() as usize;
            if cnt >= remaining {
                return w * WORD_BITS + select_in_word(word, remaining);
            }
            remaining -= cnt;
            w += 1;
        }
    }

    /// Number of bits used by the payload plus the rank/select directory.
    pub fn size_in_bits(&self) -> usize {
        self.words.len() * 64
            + self.superblocks.len() * 64
            + self.blocks.len() * 16
            + (self.select0_samples.len() + self.select1_samples.len()) * 32
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

/// Position of the `r`-th (1-based) set bit in `word`.
#[inline]
fn select_in_word(mut word: u64, r: usize) -> usize {
    for _ in 1..r {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

/// Append-only builder.
#[derive(Debug, Default)]
pub struct BitvectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitvectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitvectorBuilder {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1u64 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn finish(self) -> Bitvector {
        Bitvector::from_words(self.words, self.len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rank(bits: &[bool], b: bool, i: usize) -> usize {
        bits[..i].iter().filter(|&&x| x == b).count()
    }

    fn naive_select(bits: &[bool], b: bool, j: usize) -> Option<usize> {
        bits.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(j - 1)
            .map(|(p, _)| p)
    }

    #[test]
    fn small_examples() {
        let bv = Bitvector::from_bit_str("10110");
        assert_eq!(bv.rank1(0).unwrap(), 0);
        assert_eq!(bv.rank1(3).unwrap(), 2);
        assert_eq!(bv.rank0(5).unwrap(), 2);
        assert_eq!(bv.select1(1).unwrap(), 0);
        assert_eq!(bv.select1(3).unwrap(), 3);
        assert_eq!(bv.select0(2).unwrap(), 4);
        assert!(!bv.access(4).unwrap());
        assert!(bv.access(2).unwrap());
        assert!(Bitvector::from_bit_str("1").access(0).unwrap());
    }

    #[test]
    fn errors() {
        let bv = Bitvector::from_bit_str("10110");
        assert!(matches!(bv.rank1(6), Err(BitvectorError::OutOfRange { .. })));
        assert!(matches!(bv.access(5), Err(BitvectorError::OutOfRange { .. })));
        assert!(matches!(bv.select1(4), Err(BitvectorError::NoSuchBit { .. })));
        assert!(matches!(bv.select0(0), Err(BitvectorError::NoSuchBit { .. })));
        let empty = Bitvector::default();
        assert_eq!(empty.rank1(0).unwrap(), 0);
        assert!(empty.select1(1).is_err());
    }

    #[test]
    fn long_runs_cross_samples() {
        // enough ones and zeros to exercise several select samples
        let bits: Vec<bool> = (0..100_000).map(|i| i % 3 != 0 || i % 7 == 0).collect();
        let bv = Bitvector::from_bools(bits.iter().copied());
        for j in (1..=bv.count_ones()).step_by(997) {
            assert_eq!(bv.select1(j).unwrap(), naive_select(&bits, true, j).unwrap());
        }
        for j in (1..=bv.count_zeros()).step_by(991) {
            assert_eq!(bv.select0(j).unwrap(), naive_select(&bits, false, j).unwrap());
        }
        assert_eq!(bv.rank1(bits.len()).unwrap(), bv.count_ones());
    }

    #[test]
    fn sparse_select() {
        let mut bits = vec![false; 300_000];
        for p in [5, 70_000, 70_001, 299_999] {
            bits[p] = true;
        }
        let bv = Bitvector::from_bools(bits.iter().copied());
        assert_eq!(bv.select1(1).unwrap(), 5);
        assert_eq!(bv.select1(3).unwrap(), 70_001);
        assert_eq!(bv.select1(4).unwrap(), 299_999);
        assert_eq!(bv.select0(6).unwrap(), 6);
    }

    proptest! {
        #[test]
        fn agrees_with_linear_scan(bits in proptest::collection::vec(any::<bool>(), 0..3000), probe in 0usize..3001) {
            let bv = Bitvector::from_bools(bits.iter().copied());
            let i = probe.min(bits.len());
            prop_assert_eq!(bv.rank1(i).unwrap(), naive_rank(&bits, true, i));
            prop_assert_eq!(bv.rank0(i).unwrap() + bv.rank1(i).unwrap(), i);
            for b in [false, true] {
                let total = naive_rank(&bits, b, bits.len());
                for j in 1..=total.min(40) {
                    let p = bv.select(b, j).unwrap();
                    prop_assert_eq!(Some(p), naive_select(&bits, b, j));
                    prop_assert_eq!(bv.rank(b, p).unwrap(), j - 1);
                }
            }
        }
    }
}
