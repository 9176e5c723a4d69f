//! Block graph construction and structural validation.
//!
//! Levels are generated top-down. The nodes of level `d + 1` are exactly the
//! children of the internal nodes of level `d`: a block that is a first
//! occurrence has parents that are first occurrences too, so no other node
//! can ever be reached. Marking and leaf rewiring both reduce to
//! first-occurrence queries, which keeps the work per level proportional to
//! the number of materialized nodes rather than to `n`.

use thiserror::Error;

use crate::graph::{slot_exists, BlockGraph, Geometry, GraphError, Level};
use crate::lz77::{self, Phrase};
use crate::packed::PackedArray;
use crate::succinct::BitvectorBuilder;
use crate::text_index::{TextIndex, TextIndexError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("empty input")]
    EmptyInput,
    #[error("truncate block length {0} must be a power of two and at least 2")]
    InvalidTruncation(usize),
    #[error("flat top depth {requested} exceeds the deepest stored level {max}")]
    FlatTopTooDeep { requested: usize, max: usize },
    #[error(transparent)]
    Index(#[from] TextIndexError),
    #[error("internal invariant violated at depth {depth}: {msg}")]
    Invariant { depth: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildConfig {
    /// Block size of the deepest level, whose blocks are stored verbatim.
    pub truncate_block_len: usize,
    /// Topmost stored level; it holds every existing node.
    pub flat_top_depth: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            truncate_block_len: 4,
            flat_top_depth: 0,
        }
    }
}

impl BuildConfig {
    pub fn with_truncation(mut self, len: usize) -> Self {
        self.truncate_block_len = len;
        self
    }

    pub fn with_flat_top(mut self, depth: usize) -> Self {
        self.flat_top_depth = depth;
        self
    }
}

/// Deepest stored depth for a text of the given geometry.
pub fn trunc_depth(geom: &Geometry, truncate_block_len: usize) -> usize {
    geom.height
        .saturating_sub(truncate_block_len.trailing_zeros() as usize)
}

/// Build-time node lists: for every stored level, the global indices of the
/// materialized nodes in `B` order. Needed to place bookmarks.
#[derive(Debug, Clone, Default)]
pub struct Layout {
    pub(crate) first_depth: usize,
    pub(crate) nodes: Vec<Vec<u32>>,
}

impl Layout {
    /// Position in `B_d` of the node with global index `t`, if materialized.
    pub fn position(&self, d: usize, t: usize) -> Option<usize> {
        let nodes = self.nodes.get(d.checked_sub(self.first_depth)?)?;
        nodes.binary_search(&(t as u32)).ok()
    }

    pub fn nodes(&self, d: usize) -> &[u32] {
        &self.nodes[d - self.first_depth]
    }
}

/// Leftmost 1-based start of `text[i..=j]` (1-based, inclusive).
pub fn first_occurrence(index: &TextIndex, i: usize, j: usize) -> usize {
    index.first_occurrence(i - 1, j - i + 1) + 1
}

/// Builds the graph of `text`, constructing a temporary index.
pub fn build(text: &[u8], config: BuildConfig) -> Result<BlockGraph, BuildError> {
    check_config(text.len(), config)?;
    let index = TextIndex::new(text)?;
    Ok(build_with_index(text, &index, config)?.0)
}

fn check_config(n: usize, config: BuildConfig) -> Result<(), BuildError> {
    if n == 0 {
        return Err(BuildError::EmptyInput);
    }
    let tl = config.truncate_block_len;
    if tl < 2 || !tl.is_power_of_two() || tl > u16::MAX as usize {
        return Err(BuildError::InvalidTruncation(tl));
    }
    let geom = Geometry::new(n);
    let max = trunc_depth(&geom, tl);
    if config.flat_top_depth > max {
        return Err(BuildError::FlatTopTooDeep {
            requested: config.flat_top_depth,
            max,
        });
    }
    Ok(())
}

/// Builds the graph using a prebuilt index, also returning the node layout.
pub fn build_with_index(
    text: &[u8],
    index: &TextIndex,
    config: BuildConfig,
) -> Result<(BlockGraph, Layout), BuildError> {
    check_config(text.len(), config)?;
    let n = text.len();
    let geom = Geometry::new(n);
    let trunc = trunc_depth(&geom, config.truncate_block_len);
    let d0 = config.flat_top_depth;

    let mut levels = Vec::with_capacity(trunc - d0 + 1);
    let mut layout = Layout {
        first_depth: d0,
        nodes: Vec::with_capacity(trunc - d0 + 1),
    };
    let mut t_text = Vec::new();
    let mut nodes: Vec<u32> = (0..geom.count(d0) as u32).collect();

    for d in d0..=trunc {
        let b = geom.block(d);
        let internal: Vec<bool> = nodes
            .iter()
            .map(|&u| {
                let c = geom.start(d, u as usize);
                index.first_occurrence(c, geom.block_len(d, u as usize)) == c
            })
            .collect();

        let mut bb = BitvectorBuilder::with_capacity(nodes.len());
        let mut rb = BitvectorBuilder::with_capacity(nodes.len());
        for (i, &int) in internal.iter().enumerate() {
            bb.push(int);
            let next = internal.get(i + 1).copied().unwrap_or(false);
            rb.push(int && next);
            if int && next && nodes[i + 1] != nodes[i] + 1 {
                return Err(BuildError::Invariant {
                    depth: d,
                    msg: format!("internal nodes {} and {} are not adjacent", nodes[i], nodes[i + 1]),
                });
            }
        }

        // leaf records
        let dest_width = if d == 0 { 0 } else { (d + 1) as u8 };
        let off_width = (geom.height - d).saturating_sub(1) as u8;
        let mut dest = PackedArray::new(dest_width);
        let mut offset = PackedArray::new(off_width);
        let half = b / 2;
        let slots = crate::graph::child_slots(b);
        for (i, &u) in nodes.iter().enumerate() {
            if internal[i] {
                if d == trunc {
                    let c = geom.start(d, u as usize);
                    t_text.extend_from_slice(&text[c..c + geom.block_len(d, u as usize)]);
                }
                continue;
            }
            let c = geom.start(d, u as usize);
            for &(so, sl) in &slots {
                let abs = c + so;
                if !slot_exists(abs, sl, n) {
                    continue;
                }
                let len = sl.min(n - abs);
                let p = index.first_occurrence(abs, len);
                let (t, off) = geom.locate(d, p);
                let pos = nodes
                    .binary_search(&(t as u32))
                    .ok()
                    .filter(|&q| internal[q])
                    .ok_or_else(|| BuildError::Invariant {
                        depth: d,
                        msg: format!("slot at {abs} redirects to non-internal node {t}"),
                    })?;
                if off >= half {
                    return Err(BuildError::Invariant {
                        depth: d,
                        msg: format!("slot at {abs} has offset {off} >= {half}"),
                    });
                }
                dest.push(pos as u64);
                offset.push(off as u64);
            }
        }

        let next_nodes = if d < trunc {
            let cnt = geom.count(d + 1);
            let mut v: Vec<u32> = Vec::with_capacity(3 * internal.iter().filter(|&&x| x).count());
            for (i, &u) in nodes.iter().enumerate() {
                if !internal[i] {
                    continue;
                }
                for j in 0..3u32 {
                    let ch = if d == 0 { j } else { 2 * u + j };
                    if (ch as usize) < cnt && v.last().is_none_or(|&l| l < ch) {
                        v.push(ch);
                    }
                }
            }
            v
        } else {
            Vec::new()
        };

        levels.push(Level {
            b: bb.finish(),
            r: rb.finish(),
            dest,
            offset,
        });
        layout.nodes.push(std::mem::replace(&mut nodes, next_nodes));
    }

    let graph = BlockGraph {
        geom,
        trunc_depth: trunc,
        flat_top_depth: d0,
        truncate_block_len: config.truncate_block_len,
        levels,
        t: t_text,
    };
    Ok((graph, layout))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("graph covers {graph} characters but the text has {text}")]
    LengthMismatch { graph: usize, text: usize },
    #[error(transparent)]
    Index(#[from] TextIndexError),
    #[error("structure at depth {depth}, node {node}: {msg}")]
    Structure { depth: usize, node: usize, msg: String },
    #[error("depth {depth} has {internal} internal nodes, above the bound {bound}")]
    TooManyInternal { depth: usize, internal: usize, bound: usize },
    #[error("internal node at depth {depth} starting at {start} touches no phrase boundary")]
    NoBoundary { depth: usize, start: usize },
    #[error("leaf {node} at depth {depth}, slot {slot}: {msg}")]
    LeafRecord { depth: usize, node: usize, slot: usize, msg: String },
    #[error("extraction differs from the text at position {pos}")]
    ExtractionMismatch { pos: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStats {
    pub depth: usize,
    pub block_len: usize,
    pub nodes: usize,
    pub internal: usize,
    pub leaves: usize,
    pub slots: usize,
    pub bits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub z: usize,
    pub levels: Vec<LevelStats>,
}

/// Per-level statistics without any checking.
pub fn level_stats(graph: &BlockGraph) -> Vec<LevelStats> {
    graph
        .levels
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let d = graph.flat_top_depth + k;
            LevelStats {
                depth: d,
                block_len: graph.geom.block(d),
                nodes: l.nodes(),
                internal: l.internal(),
                leaves: l.leaves(),
                slots: l.slots(),
                bits: l.payload_bits(),
            }
        })
        .collect()
}

/// Checks `graph` against `text`, building an index and parse internally.
pub fn validate(graph: &BlockGraph, text: &[u8]) -> Result<ValidationReport, ValidateError> {
    if graph.len() != text.len() {
        return Err(ValidateError::LengthMismatch {
            graph: graph.len(),
            text: text.len(),
        });
    }
    let index = TextIndex::new(text)?;
    let parse = lz77::parse_with_index(text, &index);
    validate_with(graph, text, &index, &parse)
}

/// Checks every structural invariant of `graph` and that it reproduces `text`.
pub fn validate_with(
    graph: &BlockGraph,
    text: &[u8],
    index: &TextIndex,
    parse: &[Phrase],
) -> Result<ValidationReport, ValidateError> {
    let n = text.len();
    if graph.len() != n {
        return Err(ValidateError::LengthMismatch {
            graph: graph.len(),
            text: n,
        });
    }
    let geom = graph.geom;
    let z = parse.len();
    let starts: Vec<usize> = parse.iter().map(|p| p.start - 1).collect();
    let d0 = graph.flat_top_depth;
    let mut nodes: Vec<usize> = (0..geom.count(d0)).collect();

    for d in d0..=graph.trunc_depth {
        let lvl = graph.level(d)?;
        let b = geom.block(d);
        let half = b / 2;
        let structure = |node: usize, msg: String| ValidateError::Structure { depth: d, node, msg };
        if lvl.b.len() != nodes.len() {
            return Err(structure(
                0,
                format!("B has {} nodes, expected {}", lvl.b.len(), nodes.len()),
            ));
        }
        if lvl.r.len() != lvl.b.len() {
            return Err(structure(0, "R and B differ in length".into()));
        }
        if lvl.internal() > 3 * z {
            return Err(ValidateError::TooManyInternal {
                depth: d,
                internal: lvl.internal(),
                bound: 3 * z,
            });
        }

        let slots = crate::graph::child_slots(b);
        let mut leaf_rank = 0;
        let mut next: Vec<usize> = Vec::new();
        for (i, &u) in nodes.iter().enumerate() {
            let c = geom.start(d, u);
            let len = geom.block_len(d, u);
            let is_first = index.first_occurrence(c, len) == c;
            let bit = lvl.b.get(i);
            if bit != is_first {
                return Err(structure(i, format!("marked internal={bit}, first occurrence={is_first}")));
            }
            let shared = bit && i + 1 < nodes.len() && lvl.b.get(i + 1);
            if lvl.r.get(i) != shared {
                return Err(structure(i, "R bit inconsistent with B".into()));
            }
            if bit {
                // a first occurrence contains the start of some phrase
                let k = starts.partition_point(|&s| s < c);
                if !(k < starts.len() && starts[k] < c + len) {
                    return Err(ValidateError::NoBoundary { depth: d, start: c + 1 });
                }
                if d < graph.trunc_depth {
                    let lc = graph.left_child_index(d, i)?;
                    let first_child = if d == 0 { 0 } else { 2 * u };
                    let expected = next.len() - usize::from(next.last() == Some(&first_child));
                    if lc != expected {
                        return Err(structure(i, format!("left child {lc}, expected {expected}")));
                    }
                    let cnt = geom.count(d + 1);
                    for j in 0..3 {
                        let ch = first_child + j;
                        if ch < cnt && next.last().is_none_or(|&l| l < ch) {
                            next.push(ch);
                        }
                    }
                }
                continue;
            }
            for (slot, &(so, sl)) in slots.iter().enumerate() {
                let abs = c + so;
                let rec = graph.leaf_record(d, leaf_rank, slot);
                let leaf_err = |msg: String| ValidateError::LeafRecord { depth: d, node: i, slot, msg };
                match (slot_exists(abs, sl, n), rec) {
                    (false, None) => continue,
                    (false, Some(_)) => return Err(leaf_err("record for an absent slot".into())),
                    (true, None) => return Err(leaf_err("missing record".into())),
                    (true, Some(r)) => {
                        let slen = sl.min(n - abs);
                        if r.dest >= nodes.len() || !lvl.b.get(r.dest) {
                            return Err(leaf_err(format!("destination {} is not internal", r.dest)));
                        }
                        if half > 0 && r.offset >= half {
                            return Err(leaf_err(format!("offset {} >= {half}", r.offset)));
                        }
                        let dc = geom.start(d, nodes[r.dest]);
                        let dlen = geom.block_len(d, nodes[r.dest]);
                        if r.offset + slen > dlen || text[dc + r.offset..dc + r.offset + slen] != text[abs..abs + slen] {
                            return Err(leaf_err("content differs from destination".into()));
                        }
                    }
                }
            }
            leaf_rank += 1;
        }
        if leaf_rank != lvl.leaves() {
            return Err(structure(0, "leaf count mismatch".into()));
        }
        if d < graph.trunc_depth {
            nodes = next;
        }
    }

    let extracted = graph.extract(1, n)?;
    if let Some(pos) = extracted.iter().zip(text).position(|(a, b)| a != b) {
        return Err(ValidateError::ExtractionMismatch { pos: pos + 1 });
    }
    Ok(ValidationReport {
        z,
        levels: level_stats(graph),
    })
}
