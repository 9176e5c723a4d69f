//! Block graphs over the LZ77 parse of highly repetitive texts.
//!
//! A [`BlockIndex`] bundles the three artifacts a search needs: the
//! [`BlockGraph`] (random access and extraction), the LZ77 parse, and
//! bookmarks at phrase boundaries.
//!
//! ```
//! use blockgraph::{BlockIndex, BuildConfig};
//!
//! let text = b"abaababaabaababaababa";
//! let index = BlockIndex::build(text, BuildConfig::default(), true).unwrap();
//! assert_eq!(index.graph.extract(9, 12).unwrap(), b"abaa");
//! let hits = index.search(b"abaababa", 0).unwrap();
//! assert_eq!(hits.iter().map(|m| m.end).collect::<Vec<_>>(), vec![8, 16, 21]);
//! ```

pub mod bench;
pub mod bookmarks;
pub mod builder;
pub mod cli;
pub mod corpus;
pub mod format;
pub mod graph;
pub mod lz77;
pub mod matcher;
pub mod packed;
pub mod succinct;
pub mod text_index;

use thiserror::Error;

pub use bookmarks::{Bookmark, Bookmarks};
pub use builder::{BuildConfig, BuildError, ValidateError};
pub use graph::{BlockGraph, GraphError, Visits};
pub use lz77::{Phrase, PhraseKind};
pub use matcher::{Match, MatchError};
pub use succinct::Bitvector;
pub use text_index::TextIndex;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Bookmark(#[from] bookmarks::BookmarkError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Format(#[from] format::FormatError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
    #[error(transparent)]
    Index(#[from] text_index::TextIndexError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Graph, parse and boundary bookmarks of one text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    pub graph: BlockGraph,
    pub phrases: Vec<Phrase>,
    pub bookmarks: Bookmarks,
}

impl BlockIndex {
    /// Builds everything from `text`. With `bookmark_boundaries`, a bookmark
    /// is placed at every phrase boundary, which [`BlockIndex::search`] needs.
    pub fn build(text: &[u8], config: BuildConfig, bookmark_boundaries: bool) -> Result<Self, Error> {
        if text.is_empty() {
            return Err(BuildError::EmptyInput.into());
        }
        let index = TextIndex::new(text)?;
        Self::build_with_index(text, &index, config, bookmark_boundaries)
    }

    pub fn build_with_index(
        text: &[u8],
        index: &TextIndex,
        config: BuildConfig,
        bookmark_boundaries: bool,
    ) -> Result<Self, Error> {
        let (graph, layout) = builder::build_with_index(text, index, config)?;
        let phrases = lz77::parse_with_index(text, index);
        let bookmarks = if bookmark_boundaries {
            Bookmarks::build(&graph, &layout, index, &lz77::boundaries(&phrases))?
        } else {
            Bookmarks::default()
        };
        Ok(BlockIndex {
            graph,
            phrases,
            bookmarks,
        })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Number of LZ77 phrases.
    pub fn z(&self) -> usize {
        self.phrases.len()
    }

    pub fn search(&self, pattern: &[u8], k: usize) -> Result<Vec<Match>, MatchError> {
        matcher::search(&self.graph, &self.bookmarks, &self.phrases, pattern, k)
    }
}
