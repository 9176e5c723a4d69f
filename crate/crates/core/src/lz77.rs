//! Greedy LZ77 factorization without self-reference.
//!
//! Each phrase is the longest prefix of the unparsed suffix that occurs
//! entirely inside the already parsed prefix, or a single new character.
//! Among equally long candidates the smallest source start wins.
//!
//! Candidate lengths are checked with first-occurrence queries on a suffix
//! array: a copy of length `L` at `i` is possible iff the leftmost
//! occurrence `p` of `text[i..i+L]` satisfies `p + L <= i`. The predicate is
//! monotone in `L`, so an exponential then binary search finds the longest
//! one with `O(log L)` queries per phrase.

use serde::{Deserialize, Serialize};

use crate::text_index::{TextIndex, TextIndexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhraseKind {
    Literal(u8),
    /// 1-based start of the source interval.
    Copy { src: usize },
}

/// One factor of the parse. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phrase {
    pub start: usize,
    pub len: usize,
    pub kind: PhraseKind,
}

impl Phrase {
    pub fn literal(start: usize, c: u8) -> Self {
        Phrase {
            start,
            len: 1,
            kind: PhraseKind::Literal(c),
        }
    }

    pub fn copy(start: usize, src: usize, len: usize) -> Self {
        Phrase {
            start,
            len,
            kind: PhraseKind::Copy { src },
        }
    }

    /// Last position covered, inclusive.
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    pub fn source(&self) -> Option<(usize, usize)> {
        match self.kind {
            PhraseKind::Copy { src } => Some((src, src + self.len - 1)),
            PhraseKind::Literal(_) => None,
        }
    }
}

/// Parses `text`, building a temporary suffix-array index.
pub fn parse(text: &[u8]) -> Result<Vec<Phrase>, TextIndexError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let index = TextIndex::new(text)?;
    Ok(parse_with_index(text, &index))
}

/// Parses `text` using a prebuilt index over the same text.
pub fn parse_with_index(text: &[u8], index: &TextIndex) -> Vec<Phrase> {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut i = 0usize;
    let valid = |i: usize, len: usize| index.first_occurrence(i, len) + len <= i;
    while i < n {
        if !valid(i, 1) {
            phrases.push(Phrase::literal(i + 1, text[i]));
            i += 1;
            continue;
        }
        // exponential search for an invalid (or out-of-range) length
        let mut good = 1usize;
        let mut step = 1usize;
        let mut bad = loop {
            let cand = good + step;
            if i + cand > n {
                break n - i + 1;
            }
            if valid(i, cand) {
                good = cand;
                step *= 2;
            } else {
                break cand;
            }
        };
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if valid(i, mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        let src = index.first_occurrence(i, good);
        phrases.push(Phrase::copy(i + 1, src + 1, good));
        i += good;
    }
    phrases
}

/// End positions of every phrase but the last, ascending.
pub fn boundaries(parse: &[Phrase]) -> Vec<usize> {
    let k = parse.len().saturating_sub(1);
    parse[..k].iter().map(Phrase::end).collect()
}

/// Expands a parse back into the text.
pub fn decode(parse: &[Phrase]) -> Vec<u8> {
    let mut out = Vec::with_capacity(parse.iter().map(|p| p.len).sum());
    for p in parse {
        match p.kind {
            PhraseKind::Literal(c) => out.push(c),
            PhraseKind::Copy { src } => {
                let s = src - 1;
                out.extend_from_within(s..s + p.len);
            }
        }
    }
    out
}
