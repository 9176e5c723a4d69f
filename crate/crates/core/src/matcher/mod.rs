//! Approximate pattern matching within edit distance `k`.
//!
//! Results use end-position semantics: for every end `e` with some substring
//! ending at `e` within distance `k` of the pattern, one [`Match`] reports
//! the minimum distance and the largest start achieving it.
//!
//! Search runs in two phases. Primary matching extracts, through boundary
//! bookmarks, every character within `m + k` of a phrase boundary and
//! verifies those regions. Secondary matching then walks the phrases left to
//! right and copies the answers found inside each copy's source to the copy
//! itself, without touching the text. An end lying more than `m + k - 1`
//! characters after the start of a copy has all its candidate witnesses
//! inside the copy, so its answer equals the one at the matching source end;
//! every other end is covered by the region of the preceding boundary.

pub mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bookmarks::{extract_with_bookmark_into, BookmarkError, Bookmarks};
use crate::graph::{BlockGraph, GraphError, Visits};
use crate::lz77::{boundaries, Phrase, PhraseKind};
pub use verify::{Engine, LocalMatch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("empty pattern")]
    EmptyPattern,
    #[error("k = {k} exceeds the pattern length {m}")]
    KExceedsM { k: usize, m: usize },
    #[error("no bookmark at phrase boundary {0}; rebuild the index with boundary bookmarks")]
    MissingBookmark(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bookmark(#[from] BookmarkError),
}

/// One reported end position. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Match {
    pub end: usize,
    pub dist: usize,
    pub witness_start: usize,
}

/// A maximal run of positions within `m + k` of some boundary, with the
/// boundaries (`anchors`) it contains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub lo: usize,
    pub hi: usize,
    pub anchors: Vec<usize>,
}

/// Counters collected during one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub regions: usize,
    pub extracted_chars: usize,
    pub visits: usize,
    pub primary: usize,
    pub total: usize,
}

/// Extraction budget `2(m + k) z + z` of one search.
pub fn extraction_budget(m: usize, k: usize, z: usize) -> usize {
    2 * (m + k) * z + z
}

fn check(pattern: &[u8], k: usize) -> Result<(), MatchError> {
    if pattern.is_empty() {
        return Err(MatchError::EmptyPattern);
    }
    if k > pattern.len() {
        return Err(MatchError::KExceedsM { k, m: pattern.len() });
    }
    Ok(())
}

/// Intervals `[q - (m + k) + 1, q + m + k]` around each boundary, clamped to
/// `[1, n]`, with overlapping or adjacent intervals merged.
pub fn merge_regions(boundaries: &[usize], m: usize, k: usize, n: usize) -> Vec<Region> {
    let r = m + k;
    let mut out: Vec<Region> = Vec::new();
    for &q in boundaries {
        let lo = (q + 1).saturating_sub(r).max(1);
        let hi = (q + r).min(n);
        match out.last_mut() {
            Some(last) if lo <= last.hi + 1 => {
                last.hi = last.hi.max(hi);
                last.anchors.push(q);
            }
            _ => out.push(Region {
                lo,
                hi,
                anchors: vec![q],
            }),
        }
    }
    out
}

/// Verifies a window starting at 1-based `region_lo`, returning matches in
/// global coordinates whose witnesses lie inside the window.
pub fn verify_region(
    region_text: &[u8],
    region_lo: usize,
    pattern: &[u8],
    k: usize,
) -> Result<Vec<Match>, MatchError> {
    verify_region_with(Engine::default(), region_text, region_lo, pattern, k)
}

pub fn verify_region_with(
    engine: Engine,
    region_text: &[u8],
    region_lo: usize,
    pattern: &[u8],
    k: usize,
) -> Result<Vec<Match>, MatchError> {
    check(pattern, k)?;
    Ok(verify::verify(engine, region_text, pattern, k)
        .into_iter()
        .map(|x| Match {
            end: region_lo + x.end,
            dist: x.dist,
            witness_start: region_lo + x.start,
        })
        .collect())
}

/// Extracts `region` piecewise through the bookmarks of its anchors.
fn extract_region(
    graph: &BlockGraph,
    bookmarks: &Bookmarks,
    region: &Region,
    out: &mut Vec<u8>,
    visits: &mut Visits,
) -> Result<(), MatchError> {
    let a = &region.anchors;
    let bm = |q: usize| bookmarks.get(q).ok_or(MatchError::MissingBookmark(q));
    if region.lo < a[0] {
        extract_with_bookmark_into(graph, bm(a[0])?, region.lo, a[0] - 1, out, visits)?;
    }
    for (t, &q) in a.iter().enumerate() {
        let end = a.get(t + 1).map_or(region.hi, |&nq| nq - 1);
        if q <= end {
            extract_with_bookmark_into(graph, bm(q)?, q, end, out, visits)?;
        }
    }
    Ok(())
}

/// Matches whose ends lie near phrase boundaries. Only ends whose every
/// candidate witness lies inside their region are reported, so each value is
/// exact.
pub fn find_primary(
    graph: &BlockGraph,
    bookmarks: &Bookmarks,
    parse: &[Phrase],
    pattern: &[u8],
    k: usize,
) -> Result<Vec<Match>, MatchError> {
    find_primary_with(graph, bookmarks, parse, pattern, k, Engine::default(), &mut SearchStats::default())
}

pub fn find_primary_with(
    graph: &BlockGraph,
    bookmarks: &Bookmarks,
    parse: &[Phrase],
    pattern: &[u8],
    k: usize,
    engine: Engine,
    stats: &mut SearchStats,
) -> Result<Vec<Match>, MatchError> {
    check(pattern, k)?;
    let m = pattern.len();
    let n = graph.len();
    let bounds = boundaries(parse);
    let regions = merge_regions(&bounds, m, k, n);
    stats.regions += regions.len();
    let mut out = Vec::new();
    let mut buf = Vec::new();
    let mut visits = Visits::new();
    for region in &regions {
        buf.clear();
        extract_region(graph, bookmarks, region, &mut buf, &mut visits)?;
        stats.extracted_chars += buf.len();
        let reach = region.lo + m + k - 1;
        out.extend(
            verify_region_with(engine, &buf, region.lo, pattern, k)?
                .into_iter()
                .filter(|x| region.lo == 1 || x.end >= reach),
        );
    }
    stats.visits += visits.count;
    stats.primary += out.len();
    Ok(out)
}

/// Copies matches from phrase sources to their copies. `primary` must hold
/// exact answers for every end near a boundary, as produced by
/// [`find_primary`]. Needs only the parse, never the text.
pub fn propagate_secondary(parse: &[Phrase], primary: &[Match], m: usize, k: usize) -> Vec<Match> {
    let mut found: BTreeMap<usize, (usize, usize)> = primary
        .iter()
        .map(|x| (x.end, (x.dist, x.witness_start)))
        .collect();
    let reach = m + k;
    let mut batch = Vec::new();
    for p in parse {
        let PhraseKind::Copy { src } = p.kind else {
            continue;
        };
        let j = src + p.len - 1;
        if src + reach > j {
            continue;
        }
        let shift = p.start - src;
        batch.clear();
        batch.extend(found.range(src + reach..=j).map(|(&e, &v)| (e, v)));
        for &(e, (dist, ws)) in &batch {
            found
                .entry(e + shift)
                .and_modify(|cur| {
                    if (dist, std::cmp::Reverse(ws + shift)) < (cur.0, std::cmp::Reverse(cur.1)) {
                        *cur = (dist, ws + shift);
                    }
                })
                .or_insert((dist, ws + shift));
        }
    }
    found
        .into_iter()
        .map(|(end, (dist, witness_start))| Match {
            end,
            dist,
            witness_start,
        })
        .collect()
}

/// All matches of `pattern` within distance `k`, sorted by end.
pub fn search(
    graph: &BlockGraph,
    bookmarks: &Bookmarks,
    parse: &[Phrase],
    pattern: &[u8],
    k: usize,
) -> Result<Vec<Match>, MatchError> {
    search_with(graph, bookmarks, parse, pattern, k, Engine::default(), &mut SearchStats::default())
}

pub fn search_with(
    graph: &BlockGraph,
    bookmarks: &Bookmarks,
    parse: &[Phrase],
    pattern: &[u8],
    k: usize,
    engine: Engine,
    stats: &mut SearchStats,
) -> Result<Vec<Match>, MatchError> {
    check(pattern, k)?;
    let out = if parse.len() <= 1 {
        // a single phrase is a single literal: no boundaries to anchor on
        let text = graph.extract(1, graph.len())?;
        stats.extracted_chars += text.len();
        verify_region_with(engine, &text, 1, pattern, k)?
    } else {
        let primary = find_primary_with(graph, bookmarks, parse, pattern, k, engine, stats)?;
        propagate_secondary(parse, &primary, pattern.len(), k)
    };
    stats.total += out.len();
    Ok(out)
}
