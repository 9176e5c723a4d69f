//! The BG01 container.
//!
//! All integers are little-endian. Layout:
//!
//! ```text
//! header    "BG01" version:u16 flags:u16 n:u64 height:u8 trunc_depth:u8
//!           flat_top_depth:u8 truncate_block_len:u16 z:u64
//! levels    per stored depth: id:u8 B_bits:u64 B_words R_words
//!           leaves:u64 slots:u64 dest_width:u8 offset_width:u8
//!           dest_words offset_words
//! T         len:u64 bytes
//! phrases   z records of kind:u8 len:u64 src_or_literal:u64
//! bookmarks count:u64, per bookmark pos:u64 levels:u8 then
//!           left.node left.offset right.node right.offset as u32 per level
//! trailer   crc32 of every preceding byte
//! ```
//!
//! Flag bit 0 is set when the bookmark table is non-empty. Only raw bits are
//! stored; rank and select directories are rebuilt on load.

use std::io::{Read, Write};

use thiserror::Error;

use crate::bookmarks::{Bookmark, BookmarkLevel, Bookmarks, Target};
use crate::builder::trunc_depth;
use crate::graph::{BlockGraph, Geometry, Level};
use crate::lz77::{Phrase, PhraseKind};
use crate::packed::PackedArray;
use crate::succinct::Bitvector;
use crate::BlockIndex;

pub const MAGIC: [u8; 4] = *b"BG01";
pub const VERSION: u16 = 1;
const FLAG_BOOKMARKS: u16 = 1;
const HEADER_BYTES: usize = 4 + 2 + 2 + 8 + 1 + 1 + 1 + 2 + 8;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("not a BG01 container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u16),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("container truncated while reading {0}")]
    Truncated(&'static str),
    #[error("inconsistent container: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Byte counts per section; they sum to the file size.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SectionSizes {
    pub header: usize,
    pub levels: usize,
    pub truncated_text: usize,
    pub phrases: usize,
    pub bookmarks: usize,
    pub checksum: usize,
}

impl SectionSizes {
    pub fn total(&self) -> usize {
        self.header + self.levels + self.truncated_text + self.phrases + self.bookmarks + self.checksum
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn words(&mut self, w: &[u64]) {
        for &x in w {
            self.u64(x);
        }
    }
}

fn encode(graph: &BlockGraph, parse: &[Phrase], bookmarks: &Bookmarks) -> (Vec<u8>, SectionSizes) {
    let mut w = Writer { buf: Vec::new() };
    let mut sizes = SectionSizes::default();
    let mut mark = 0usize;
    let mut cut = |w: &Writer| {
        let s = w.buf.len() - mark;
        mark = w.buf.len();
        s
    };

    w.buf.extend_from_slice(&MAGIC);
    w.u16(VERSION);
    w.u16(if bookmarks.is_empty() { 0 } else { FLAG_BOOKMARKS });
    w.u64(graph.len() as u64);
    w.u8(graph.height() as u8);
    w.u8(graph.trunc_depth() as u8);
    w.u8(graph.flat_top_depth() as u8);
    w.u16(graph.truncate_block_len() as u16);
    w.u64(parse.len() as u64);
    sizes.header = cut(&w);

    for (k, lvl) in graph.levels().iter().enumerate() {
        w.u8((graph.flat_top_depth() + k) as u8);
        w.u64(lvl.b.len() as u64);
        w.words(lvl.b.words());
        w.words(lvl.r.words());
        w.u64(lvl.leaves() as u64);
        w.u64(lvl.slots() as u64);
        w.u8(lvl.dest.width());
        w.u8(lvl.offset.width());
        w.words(lvl.dest.words());
        w.words(lvl.offset.words());
    }
    sizes.levels = cut(&w);

    w.u64(graph.truncated_text().len() as u64);
    w.buf.extend_from_slice(graph.truncated_text());
    sizes.truncated_text = cut(&w);

    for p in parse {
        match p.kind {
            PhraseKind::Literal(c) => {
                w.u8(0);
                w.u64(p.len as u64);
                w.u64(c as u64);
            }
            PhraseKind::Copy { src } => {
                w.u8(1);
                w.u64(p.len as u64);
                w.u64(src as u64);
            }
        }
    }
    sizes.phrases = cut(&w);

    w.u64(bookmarks.len() as u64);
    for bm in bookmarks.iter() {
        w.u64(bm.pos as u64);
        w.u8(bm.levels.len() as u8);
        for l in &bm.levels {
            w.u32(l.left.node);
            w.u32(l.left.offset);
            w.u32(l.right.node);
            w.u32(l.right.offset);
        }
    }
    sizes.bookmarks = cut(&w);

    let crc = crc32fast::hash(&w.buf);
    w.u32(crc);
    sizes.checksum = 4;
    (w.buf, sizes)
}

/// Serializes into a byte vector.
pub fn to_bytes(graph: &BlockGraph, parse: &[Phrase], bookmarks: &Bookmarks) -> Vec<u8> {
    encode(graph, parse, bookmarks).0
}

/// Per-section byte counts of the serialized container.
pub fn section_sizes(graph: &BlockGraph, parse: &[Phrase], bookmarks: &Bookmarks) -> SectionSizes {
    encode(graph, parse, bookmarks).1
}

/// Writes the container to `sink`, returning the number of bytes written.
pub fn save<W: Write>(
    graph: &BlockGraph,
    parse: &[Phrase],
    bookmarks: &Bookmarks,
    mut sink: W,
) -> Result<usize, FormatError> {
    let bytes = to_bytes(graph, parse, bookmarks);
    sink.write_all(&bytes)?;
    sink.flush()?;
    Ok(bytes.len())
}

/// Reads a whole container from `source`.
pub fn load<R: Read>(mut source: R) -> Result<BlockIndex, FormatError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn save_index<W: Write>(index: &BlockIndex, sink: W) -> Result<usize, FormatError> {
    save(&index.graph, &index.phrases, &index.bookmarks, sink)
}

pub fn index_to_bytes(index: &BlockIndex) -> Vec<u8> {
    to_bytes(&index.graph, &index.phrases, &index.bookmarks)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize, what: &'static str) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < k {
            return Err(FormatError::Truncated(what));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
    fn u8(&mut self, what: &'static str) -> Result<u8, FormatError> {
        Ok(self.take(1, what)?[0])
    }
    fn u16(&mut self, what: &'static str) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
    fn u32(&mut self, what: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &'static str) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn usize(&mut self, what: &'static str) -> Result<usize, FormatError> {
        usize::try_from(self.u64(what)?).map_err(|_| FormatError::Invalid(format!("{what} overflows")))
    }
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
    /// Reads `count` units of `unit` bytes, refusing counts the input
    /// cannot possibly hold.
    fn guard(&self, count: usize, unit: usize, what: &'static str) -> Result<(), FormatError> {
        match count.checked_mul(unit) {
            Some(b) if b <= self.remaining() => Ok(()),
            _ => Err(FormatError::Truncated(what)),
        }
    }
    fn words(&mut self, count: usize, what: &'static str) -> Result<Vec<u64>, FormatError> {
        self.guard(count, 8, what)?;
        (0..count).map(|_| self.u64(what)).collect()
    }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

/// Parses a container held in memory.
pub fn from_bytes(bytes: &[u8]) -> Result<BlockIndex, FormatError> {
    let head = bytes.len().min(4);
    if bytes[..head] != MAGIC[..head] {
        return Err(FormatError::BadMagic);
    }
    if head < 4 {
        return Err(FormatError::Truncated("magic"));
    }
    if bytes.len() < 6 {
        return Err(FormatError::Truncated("header"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    if bytes.len() < HEADER_BYTES + 4 {
        return Err(FormatError::Truncated("header"));
    }
    let (body, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32fast::hash(body);
    let parsed = decode(body);
    if stored != computed {
        return Err(match parsed {
            Err(e @ FormatError::Truncated(_)) => e,
            _ => FormatError::ChecksumMismatch { stored, computed },
        });
    }
    parsed
}

fn decode(body: &[u8]) -> Result<BlockIndex, FormatError> {
    let mut r = Reader { buf: body, pos: 6 };
    let flags = r.u16("header")?;
    let n = r.usize("header")?;
    let height = r.u8("header")? as usize;
    let trunc = r.u8("header")? as usize;
    let flat = r.u8("header")? as usize;
    let tlen = r.u16("header")? as usize;
    let z = r.usize("header")?;

    if n == 0 {
        return Err(invalid("empty text"));
    }
    let geom = Geometry::new(n);
    if geom.height != height {
        return Err(invalid(format!("height {height} does not match n = {n}")));
    }
    if tlen < 2 || !tlen.is_power_of_two() || trunc_depth(&geom, tlen) != trunc || flat > trunc {
        return Err(invalid("inconsistent truncation or flat-top depth"));
    }

    let mut levels = Vec::with_capacity(trunc - flat + 1);
    let mut expected_nodes = geom.count(flat);
    for d in flat..=trunc {
        let id = r.u8("level")? as usize;
        if id != d {
            return Err(invalid(format!("level id {id}, expected {d}")));
        }
        let bits = r.usize("level")?;
        if (d == flat && bits != expected_nodes) || bits > expected_nodes || bits + 1 < expected_nodes {
            return Err(invalid(format!("depth {d} has {bits} nodes, expected at most {expected_nodes}")));
        }
        let nw = bits.div_ceil(64);
        let b = Bitvector::from_words(r.words(nw, "level bits")?, bits);
        let rr = Bitvector::from_words(r.words(nw, "level bits")?, bits);
        let leaves = r.usize("level")?;
        let slots = r.usize("level")?;
        let dw = r.u8("level")?;
        let ow = r.u8("level")?;
        if leaves != b.count_zeros() {
            return Err(invalid(format!("depth {d}: leaf count {leaves} disagrees with B")));
        }
        let per = crate::graph::child_slots(geom.block(d)).len();
        if slots > per * leaves || slots + 1 < per * leaves {
            return Err(invalid(format!("depth {d}: {slots} slots for {leaves} leaves")));
        }
        let want_dw = if d == 0 { 0 } else { (d + 1) as u8 };
        let want_ow = (height - d).saturating_sub(1) as u8;
        if dw != want_dw || ow != want_ow {
            return Err(invalid(format!("depth {d}: unexpected field widths {dw}/{ow}")));
        }
        let dest_words = r.words((slots * dw as usize).div_ceil(64), "leaf records")?;
        let off_words = r.words((slots * ow as usize).div_ceil(64), "leaf records")?;
        let dest = PackedArray::from_raw(dw, slots, dest_words);
        let offset = PackedArray::from_raw(ow, slots, off_words);
        for i in 0..bits.saturating_sub(1) {
            if rr.get(i) != (b.get(i) && b.get(i + 1)) {
                return Err(invalid(format!("depth {d}: R disagrees with B at {i}")));
            }
        }
        if bits > 0 && rr.get(bits - 1) {
            return Err(invalid(format!("depth {d}: trailing R bit set")));
        }
        for v in dest.iter() {
            if v as usize >= bits || !b.get(v as usize) {
                return Err(invalid(format!("depth {d}: leaf record targets non-internal node {v}")));
            }
        }
        expected_nodes = 3 * b.count_ones() - rr.count_ones();
        levels.push(Level { b, r: rr, dest, offset });
    }

    let tl = r.usize("truncated text")?;
    let tb = r.take(tl, "truncated text")?.to_vec();
    let blk = geom.block(trunc);
    let ones = levels.last().map_or(0, |l| l.b.count_ones());
    if tl > ones * blk || (ones > 0 && tl + blk <= ones * blk) {
        return Err(invalid(format!("truncated text of {tl} bytes for {ones} blocks of {blk}")));
    }

    r.guard(z, 17, "phrases")?;
    let mut phrases = Vec::with_capacity(z);
    let mut start = 1usize;
    for _ in 0..z {
        let kind = r.u8("phrases")?;
        let len = r.usize("phrases")?;
        let v = r.usize("phrases")?;
        let p = match kind {
            0 if len == 1 && v < 256 => Phrase::literal(start, v as u8),
            1 if len >= 1 && v >= 1 && v + len <= start => Phrase::copy(start, v, len),
            _ => return Err(invalid(format!("bad phrase record at {start}"))),
        };
        start += len;
        phrases.push(p);
    }
    if start != n + 1 {
        return Err(invalid("phrases do not tile the text"));
    }

    let count = r.usize("bookmarks")?;
    if (flags & FLAG_BOOKMARKS != 0) != (count > 0) {
        return Err(invalid("bookmark flag disagrees with the table"));
    }
    r.guard(count, 9, "bookmarks")?;
    let mut items = Vec::with_capacity(count);
    for _ in 0..count {
        let pos = r.usize("bookmarks")?;
        let nl = r.u8("bookmarks")? as usize;
        if nl != levels.len() || pos == 0 || pos > n {
            return Err(invalid(format!("bad bookmark record at {pos}")));
        }
        let mut bl = Vec::with_capacity(nl);
        for (k, lvl) in levels.iter().enumerate() {
            let mut t = || -> Result<Target, FormatError> {
                let node = r.u32("bookmarks")?;
                let offset = r.u32("bookmarks")?;
                if node as usize >= lvl.b.len() || !lvl.b.get(node as usize) {
                    return Err(invalid(format!("bookmark {pos} targets non-internal node at depth {}", flat + k)));
                }
                Ok(Target { node, offset })
            };
            let left = t()?;
            let right = t()?;
            bl.push(BookmarkLevel { left, right });
        }
        items.push(Bookmark { pos, levels: bl });
    }
    if r.remaining() != 0 {
        return Err(invalid(format!("{} trailing bytes", r.remaining())));
    }

    let graph = BlockGraph {
        geom,
        trunc_depth: trunc,
        flat_top_depth: flat,
        truncate_block_len: tlen,
        levels,
        t: tb,
    };
    Ok(BlockIndex {
        graph,
        phrases,
        bookmarks: Bookmarks::from_vec(items),
    })
}
