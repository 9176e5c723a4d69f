//! The queryable block graph.
//!
//! Depth `d` has block size `b = 2^(h - d)` where `h = ceil(log2 n)`. For
//! `d >= 1` blocks start every `b / 2` characters; depth 0 holds only the
//! root. Blocks past the end of the text are clamped, and a block whose start
//! lies more than half a block beyond its predecessor's coverage is absent.
//!
//! Each stored level keeps:
//!
//! - `B`: one bit per materialized node, 1 for internal, 0 for leaf;
//! - `R`: `R[i] = B[i] & B[i+1]`, marking internal neighbours that share a child;
//! - `L`: one `(dest, offset)` record per child slot of every leaf, bit-packed.
//!
//! The deepest level stores the text of its internal blocks in `T`.
//!
//! Extraction walks down from the top stored level. An interval that fits
//! inside one child descends into it; a leaf redirects the interval to the
//! internal node holding the first occurrence of that child's content; an
//! interval that fits no child is cut in two.

use thiserror::Error;

use crate::packed::PackedArray;
use crate::succinct::Bitvector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("position range [{from}, {to}] is invalid for text length {n}")]
    Range { from: usize, to: usize, n: usize },
    #[error("depth {depth} is not stored (levels {first}..={last})")]
    LevelAbsent { depth: usize, first: usize, last: usize },
    #[error("node {node} at depth {depth} does not exist")]
    NoSuchNode { depth: usize, node: usize },
    #[error("node {node} at depth {depth} is a leaf")]
    NotInternal { depth: usize, node: usize },
    #[error("node {node} at depth {depth} is internal")]
    NotALeaf { depth: usize, node: usize },
    #[error("leaf {node} at depth {depth} has no child slot {slot}")]
    NoSuchChild { depth: usize, node: usize, slot: usize },
    #[error("depth {0} is the truncated level and has no children")]
    Truncated(usize),
}

/// One node visit during extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub depth: usize,
    /// Position of the node in `B_depth`.
    pub node: usize,
    /// Requested interval, relative to the node's block, inclusive.
    pub lo: usize,
    pub hi: usize,
    pub leaf: bool,
}

/// Node-visit counter with an optional full trace.
#[derive(Debug, Clone, Default)]
pub struct Visits {
    pub count: usize,
    pub trace: Option<Vec<Visit>>,
}

impl Visits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tracing() -> Self {
        Visits {
            count: 0,
            trace: Some(Vec::new()),
        }
    }

    #[inline]
    fn record(&mut self, v: Visit) {
        self.count += 1;
        if let Some(t) = &mut self.trace {
            t.push(v);
        }
    }
}

/// Redirection record of one leaf child slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafRecord {
    /// Position in `B_d` of the internal target node.
    pub dest: usize,
    pub offset: usize,
}

/// One stored level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub(crate) b: Bitvector,
    pub(crate) r: Bitvector,
    pub(crate) dest: PackedArray,
    pub(crate) offset: PackedArray,
}

impl Level {
    pub fn bits(&self) -> &Bitvector {
        &self.b
    }

    pub fn shared(&self) -> &Bitvector {
        &self.r
    }

    pub fn nodes(&self) -> usize {
        self.b.len()
    }

    pub fn internal(&self) -> usize {
        self.b.count_ones()
    }

    pub fn leaves(&self) -> usize {
        self.b.count_zeros()
    }

    pub fn slots(&self) -> usize {
        self.dest.len()
    }

    pub fn dest_array(&self) -> &PackedArray {
        &self.dest
    }

    pub fn offset_array(&self) -> &PackedArray {
        &self.offset
    }

    /// Payload bits: `B`, `R` and the packed leaf records.
    pub fn payload_bits(&self) -> usize {
        2 * self.b.len() + self.dest.size_in_bits() + self.offset.size_in_bits()
    }
}

/// Size and stride arithmetic shared by the builder and the queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub n: usize,
    pub height: usize,
}

impl Geometry {
    pub fn new(n: usize) -> Self {
        let height = if n <= 1 {
            0
        } else {
            (usize::BITS - (n - 1).leading_zeros()) as usize
        };
        Geometry { n, height }
    }

    #[inline]
    pub fn block(&self, d: usize) -> usize {
        (1usize << self.height) >> d
    }

    /// Distance between consecutive block starts; the root's is its size.
    #[inline]
    pub fn stride(&self, d: usize) -> usize {
        if d == 0 {
            self.block(0)
        } else {
            self.block(d) / 2
        }
    }

    /// Number of existing nodes at depth `d`.
    pub fn count(&self, d: usize) -> usize {
        if d == 0 {
            1
        } else {
            ((self.n - 1) / self.stride(d)).max(1)
        }
    }

    #[inline]
    pub fn start(&self, d: usize, t: usize) -> usize {
        if d == 0 {
            0
        } else {
            t * self.stride(d)
        }
    }

    #[inline]
    pub fn block_len(&self, d: usize, t: usize) -> usize {
        self.block(d).min(self.n - self.start(d, t))
    }

    /// Node at depth `d` containing the window `[p, p + len)`, with the
    /// window's offset inside it. Windows of length at most half a block are
    /// always contained in one of the two candidates.
    pub fn locate(&self, d: usize, p: usize) -> (usize, usize) {
        if d == 0 {
            return (0, p);
        }
        let s = self.stride(d);
        let t = p / s;
        let cnt = self.count(d);
        if t < cnt {
            (t, p - t * s)
        } else {
            (cnt - 1, p - (cnt - 1) * s)
        }
    }
}

/// Child intervals `(offset, len)` of a block of size `b`, also used for
/// the redirection slots of leaves, and how many of them there are.
#[inline]
fn slot_geometry(b: usize) -> ([(usize, usize); 3], usize) {
    match b {
        0 | 1 => ([(0, 0); 3], 0),
        2 => ([(0, 1), (1, 1), (0, 0)], 2),
        _ => ([(0, b / 2), (b / 4, b / 2), (b / 2, b / 2)], 3),
    }
}

/// Child intervals of a block of size `b` as `(offset, len)` pairs.
pub fn child_slots(b: usize) -> Vec<(usize, usize)> {
    let (s, k) = slot_geometry(b);
    s[..k].to_vec()
}

/// Whether a slot starting at absolute position `abs` with nominal length
/// `len` survives padding removal.
#[inline]
pub fn slot_exists(abs: usize, len: usize, n: usize) -> bool {
    abs == 0 || abs + len / 2 < n
}

/// `3 rank1(B, i) - rank1(R, i)`: position in the next level of the left
/// child of internal node `i`.
pub fn left_child(b: &Bitvector, r: &Bitvector, i: usize) -> usize {
    3 * b.rank1_unchecked(i) - r.rank1_unchecked(i)
}

/// Best two-way cut of `[lo, hi]` across two existing slots, maximising the
/// shorter piece. Returns `(left slot, right slot, cut)` where the pieces are
/// `[lo, cut - 1]` and `[cut, hi]`.
fn best_split(
    geom: &[(usize, usize)],
    exists: impl Fn(usize) -> bool,
    lo: usize,
    hi: usize,
) -> Option<(usize, usize, usize)> {
    let mut best: Option<(usize, usize, usize, usize)> = None;
    for a in 0..geom.len() {
        let (oa, la) = geom[a];
        if !exists(a) || lo < oa || lo >= oa + la {
            continue;
        }
        for c in a + 1..geom.len() {
            let (oc, lc) = geom[c];
            if !exists(c) || hi < oc || hi >= oc + lc {
                continue;
            }
            let xmin = (lo + 1).max(oc);
            let xmax = hi.min(oa + la);
            if xmin > xmax {
                continue;
            }
            let mid = lo + (hi - lo).div_ceil(2);
            let x = mid.clamp(xmin, xmax);
            let shorter = (x - lo).min(hi + 1 - x);
            if best.is_none_or(|(_, _, _, s)| shorter > s) {
                best = Some((a, c, x, shorter));
            }
        }
    }
    best.map(|(a, c, x, _)| (a, c, x))
}

/// Block graph over a text of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGraph {
    pub(crate) geom: Geometry,
    pub(crate) trunc_depth: usize,
    pub(crate) flat_top_depth: usize,
    pub(crate) truncate_block_len: usize,
    /// Levels `flat_top_depth..=trunc_depth`.
    pub(crate) levels: Vec<Level>,
    pub(crate) t: Vec<u8>,
}

impl BlockGraph {
    pub fn len(&self) -> usize {
        self.geom.n
    }

    pub fn is_empty(&self) -> bool {
        self.geom.n == 0
    }

    pub fn height(&self) -> usize {
        self.geom.height
    }

    pub fn geometry(&self) -> Geometry {
        self.geom
    }

    pub fn trunc_depth(&self) -> usize {
        self.trunc_depth
    }

    pub fn flat_top_depth(&self) -> usize {
        self.flat_top_depth
    }

    pub fn truncate_block_len(&self) -> usize {
        self.truncate_block_len
    }

    pub fn truncated_text(&self) -> &[u8] {
        &self.t
    }

    /// Stored levels, starting at depth `flat_top_depth`.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, d: usize) -> Result<&Level, GraphError> {
        if d < self.flat_top_depth || d > self.trunc_depth {
            return Err(GraphError::LevelAbsent {
                depth: d,
                first: self.flat_top_depth,
                last: self.trunc_depth,
            });
        }
        Ok(&self.levels[d - self.flat_top_depth])
    }

    /// Total payload bits of all levels plus `T`.
    pub fn payload_bits(&self) -> usize {
        self.levels.iter().map(Level::payload_bits).sum::<usize>() + 8 * self.t.len()
    }

    pub fn left_child_index(&self, d: usize, i: usize) -> Result<usize, GraphError> {
        let lvl = self.level(d)?;
        if i >= lvl.b.len() {
            return Err(GraphError::NoSuchNode { depth: d, node: i });
        }
        if !lvl.b.get(i) {
            return Err(GraphError::NotInternal { depth: d, node: i });
        }
        if d == self.trunc_depth {
            return Err(GraphError::Truncated(d));
        }
        Ok(left_child(&lvl.b, &lvl.r, i))
    }

    pub fn leaf_record(&self, d: usize, leaf_rank: usize, slot: usize) -> Option<LeafRecord> {
        let lvl = self.level(d).ok()?;
        let per = slot_geometry(self.geom.block(d)).1;
        if slot >= per {
            return None;
        }
        let k = leaf_rank * per + slot;
        (k < lvl.dest.len()).then(|| LeafRecord {
            dest: lvl.dest.get(k) as usize,
            offset: lvl.offset.get(k) as usize,
        })
    }

    /// Redirection `(internal node position, offset)` of a leaf's child slot.
    pub fn resolve_leaf(&self, d: usize, i: usize, slot: usize) -> Result<(usize, usize), GraphError> {
        let lvl = self.level(d)?;
        if i >= lvl.b.len() {
            return Err(GraphError::NoSuchNode { depth: d, node: i });
        }
        if lvl.b.get(i) {
            return Err(GraphError::NotALeaf { depth: d, node: i });
        }
        let rec = self
            .leaf_record(d, lvl.b.rank0_unchecked(i), slot)
            .ok_or(GraphError::NoSuchChild {
                depth: d,
                node: i,
                slot,
            })?;
        Ok((rec.dest, rec.offset))
    }

    fn check_range(&self, f: usize, l: usize) -> Result<(), GraphError> {
        if f == 0 || f > l || l > self.geom.n {
            return Err(GraphError::Range {
                from: f,
                to: l,
                n: self.geom.n,
            });
        }
        Ok(())
    }

    /// Character at 1-based position `i`.
    pub fn access(&self, i: usize) -> Result<u8, GraphError> {
        self.check_range(i, i)?;
        let mut out = Vec::with_capacity(1);
        self.extract_from_top(i - 1, i - 1, &mut out, &mut Visits::new());
        Ok(out[0])
    }

    /// `text[f..=l]` for 1-based `f`, `l`.
    pub fn extract(&self, f: usize, l: usize) -> Result<Vec<u8>, GraphError> {
        let mut out = Vec::with_capacity(l.saturating_sub(f) + 1);
        self.extract_into(f, l, &mut out, &mut Visits::new())?;
        Ok(out)
    }

    /// Appends `text[f..=l]` to `out`, counting node visits.
    pub fn extract_into(
        &self,
        f: usize,
        l: usize,
        out: &mut Vec<u8>,
        visits: &mut Visits,
    ) -> Result<(), GraphError> {
        self.check_range(f, l)?;
        self.extract_from_top(f - 1, l - 1, out, visits);
        Ok(())
    }

    /// 0-based inclusive extraction starting at the top stored level.
    pub(crate) fn extract_from_top(&self, lo: usize, hi: usize, out: &mut Vec<u8>, visits: &mut Visits) {
        let d = self.flat_top_depth;
        if d == 0 {
            self.extract_node(0, 0, lo, hi, out, visits);
            return;
        }
        let s = self.geom.stride(d);
        let cnt = self.geom.count(d);
        let mut p = lo;
        while p <= hi {
            let t = (p / s).min(cnt - 1);
            let c = t * s;
            let end = hi.min(c + self.geom.block_len(d, t) - 1);
            self.extract_node(d, t, p - c, end - c, out, visits);
            p = end + 1;
        }
    }

    /// Appends the characters `[lo, hi]` (relative to the block) of node `i`
    /// in `B_d`.
    pub(crate) fn extract_node(
        &self,
        d: usize,
        i: usize,
        lo: usize,
        hi: usize,
        out: &mut Vec<u8>,
        visits: &mut Visits,
    ) {
        let lvl = &self.levels[d - self.flat_top_depth];
        let internal = lvl.b.get(i);
        visits.record(Visit {
            depth: d,
            node: i,
            lo,
            hi,
            leaf: !internal,
        });
        let b = self.geom.block(d);
        let (geom, k) = slot_geometry(b);
        let geom = &geom[..k];

        if internal {
            if d == self.trunc_depth {
                let base = lvl.b.rank1_unchecked(i) * b;
                out.extend_from_slice(&self.t[base + lo..=base + hi]);
                return;
            }
            let lc = left_child(&lvl.b, &lvl.r, i);
            let next = self.levels[d + 1 - self.flat_top_depth].b.len();
            let exists = |j: usize| lc + j < next;
            let go = |j: usize, a: usize, z: usize, out: &mut Vec<u8>, v: &mut Visits| {
                self.extract_node(d + 1, lc + j, a, z, out, v)
            };
            self.descend(geom, exists, go, lo, hi, out, visits);
        } else {
            let base = lvl.b.rank0_unchecked(i) * k;
            let exists = |j: usize| base + j < lvl.dest.len();
            let go = |j: usize, a: usize, z: usize, out: &mut Vec<u8>, v: &mut Visits| {
                let dest = lvl.dest.get(base + j) as usize;
                let off = lvl.offset.get(base + j) as usize;
                self.extract_node(d, dest, off + a, off + z, out, v)
            };
            self.descend(geom, exists, go, lo, hi, out, visits);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        geom: &[(usize, usize)],
        exists: impl Fn(usize) -> bool,
        go: impl Fn(usize, usize, usize, &mut Vec<u8>, &mut Visits),
        lo: usize,
        hi: usize,
        out: &mut Vec<u8>,
        visits: &mut Visits,
    ) {
        if let Some(j) = (0..geom.len()).find(|&j| {
            let (o, len) = geom[j];
            exists(j) && o <= lo && hi < o + len
        }) {
            let o = geom[j].0;
            go(j, lo - o, hi - o, out, visits);
            return;
        }
        let (a, c, x) = best_split(geom, &exists, lo, hi)
            .expect("every in-range interval is covered by at most two child slots");
        let (oa, oc) = (geom[a].0, geom[c].0);
        go(a, lo - oa, x - 1 - oa, out, visits);
        go(c, x - oc, hi - oc, out, visits);
    }
}
