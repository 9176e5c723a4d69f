//! Bookmarks: per-level entry points that make extraction around a fixed
//! position cost time linear in the extracted length.
//!
//! For every stored level with block size `2w`, a bookmark at `pos` keeps the
//! internal node containing the first occurrence of the `w` characters ending
//! at `pos` and of the `w` characters starting at `pos`. Windows that would
//! leave the text are clamped to it. Since a first occurrence can only lie in
//! blocks that are first occurrences themselves, the node at that depth
//! covering it is always internal and materialized.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::Layout;
use crate::graph::{BlockGraph, GraphError, Visits};
use crate::text_index::TextIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BookmarkError {
    #[error("bookmark position {pos} outside 1..={n}")]
    OutOfRange { pos: usize, n: usize },
    #[error("interval [{from}, {to}] does not touch the bookmark at {pos}")]
    NotTouching { from: usize, to: usize, pos: usize },
    #[error("no bookmark at position {0}")]
    Missing(usize),
    #[error("target of window at {start} (depth {depth}) is not an internal node")]
    Unresolved { depth: usize, start: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// An internal node position in `B_d` and an offset inside its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub node: u32,
    pub offset: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookmarkLevel {
    pub left: Target,
    pub right: Target,
}

/// Entry points around 1-based position `pos`, one record per stored level
/// starting at the graph's top stored depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bookmark {
    pub pos: usize,
    pub levels: Vec<BookmarkLevel>,
}

/// Window length used by bookmarks at depth `d`.
#[inline]
pub fn window(graph: &BlockGraph, d: usize) -> usize {
    (graph.geometry().block(d) / 2).max(1)
}

fn left_window(pos: usize, w: usize) -> (usize, usize) {
    ((pos + 1).saturating_sub(w).max(1), pos)
}

fn right_window(pos: usize, w: usize, n: usize) -> (usize, usize) {
    (pos, (pos + w - 1).min(n))
}

fn resolve(
    graph: &BlockGraph,
    layout: &Layout,
    index: &TextIndex,
    d: usize,
    (a, e): (usize, usize),
) -> Result<Target, BookmarkError> {
    let p = index.first_occurrence(a - 1, e - a + 1);
    let (t, offset) = graph.geometry().locate(d, p);
    let node = layout
        .position(d, t)
        .filter(|&i| graph.level(d).map(|l| l.bits().get(i)).unwrap_or(false))
        .ok_or(BookmarkError::Unresolved { depth: d, start: a })?;
    Ok(Target {
        node: node as u32,
        offset: offset as u32,
    })
}

/// Creates the bookmark for 1-based `pos`.
pub fn add_bookmark(
    graph: &BlockGraph,
    layout: &Layout,
    index: &TextIndex,
    pos: usize,
) -> Result<Bookmark, BookmarkError> {
    let n = graph.len();
    if pos == 0 || pos > n {
        return Err(BookmarkError::OutOfRange { pos, n });
    }
    let levels = (graph.flat_top_depth()..=graph.trunc_depth())
        .map(|d| {
            let w = window(graph, d);
            Ok(BookmarkLevel {
                left: resolve(graph, layout, index, d, left_window(pos, w))?,
                right: resolve(graph, layout, index, d, right_window(pos, w, n))?,
            })
        })
        .collect::<Result<_, BookmarkError>>()?;
    Ok(Bookmark { pos, levels })
}

/// Bookmarks sorted by position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bookmarks {
    items: Vec<Bookmark>,
}

impl Bookmarks {
    pub fn build(
        graph: &BlockGraph,
        layout: &Layout,
        index: &TextIndex,
        positions: &[usize],
    ) -> Result<Self, BookmarkError> {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        pos.dedup();
        let items = pos
            .into_iter()
            .map(|p| add_bookmark(graph, layout, index, p))
            .collect::<Result<_, _>>()?;
        Ok(Bookmarks { items })
    }

    /// Wraps already created bookmarks; they are sorted and deduplicated.
    pub fn from_vec(mut items: Vec<Bookmark>) -> Self {
        items.sort_by_key(|b| b.pos);
        items.dedup_by_key(|b| b.pos);
        Bookmarks { items }
    }

    pub fn get(&self, pos: usize) -> Option<&Bookmark> {
        self.items
            .binary_search_by_key(&pos, |b| b.pos)
            .ok()
            .map(|i| &self.items[i])
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Bookmark> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Bookmark] {
        &self.items
    }
}

/// Extracts `text[f..=l]` (1-based) for an interval touching the bookmark,
/// meaning `f <= bm.pos <= l + 1`.
pub fn extract_with_bookmark(
    graph: &BlockGraph,
    bm: &Bookmark,
    f: usize,
    l: usize,
) -> Result<Vec<u8>, BookmarkError> {
    let mut out = Vec::with_capacity(l.saturating_sub(f) + 1);
    extract_with_bookmark_into(graph, bm, f, l, &mut out, &mut Visits::new())?;
    Ok(out)
}

/// As [`extract_with_bookmark`], appending to `out` and counting visits.
pub fn extract_with_bookmark_into(
    graph: &BlockGraph,
    bm: &Bookmark,
    f: usize,
    l: usize,
    out: &mut Vec<u8>,
    visits: &mut Visits,
) -> Result<(), BookmarkError> {
    let n = graph.len();
    if f == 0 || f > l || l > n {
        return Err(GraphError::Range { from: f, to: l, n }.into());
    }
    let pos = bm.pos;
    if pos < f || pos > l + 1 {
        return Err(BookmarkError::NotTouching { from: f, to: l, pos });
    }
    if f < pos {
        part(graph, bm, f, pos - 1, true, out, visits);
    }
    if pos <= l {
        part(graph, bm, pos, l, false, out, visits);
    }
    Ok(())
}

fn part(
    graph: &BlockGraph,
    bm: &Bookmark,
    a: usize,
    e: usize,
    left: bool,
    out: &mut Vec<u8>,
    visits: &mut Visits,
) {
    let d0 = graph.flat_top_depth();
    let n = graph.len();
    // deepest level whose window still covers the part
    for d in (d0..=graph.trunc_depth()).rev() {
        let w = window(graph, d);
        let (ws, we) = if left {
            left_window(bm.pos, w)
        } else {
            right_window(bm.pos, w, n)
        };
        if ws <= a && e <= we {
            let rec = bm.levels[d - d0];
            let t = if left { rec.left } else { rec.right };
            let o = t.offset as usize;
            graph.extract_node(d, t.node as usize, o + a - ws, o + e - ws, out, visits);
            return;
        }
    }
    graph.extract_from_top(a - 1, e - 1, out, visits);
}
