//! Save an index to a BG01 container, load it back and inspect the sections.

use blockgraph::corpus::{generate, CorpusConfig};
use blockgraph::format::{self, FormatError};
use blockgraph::{BlockIndex, BuildConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = generate(&CorpusConfig {
        base_size: 4096,
        copies: 8,
        mutation_rate: 0.002,
        seed: 1,
        ..Default::default()
    });
    let index = BlockIndex::build(&text, BuildConfig::default(), true)?;

    let bytes = format::index_to_bytes(&index);
    let s = format::section_sizes(&index.graph, &index.phrases, &index.bookmarks);
    println!("raw {} bytes, container {} bytes", text.len(), bytes.len());
    println!("{s:#?}");

    let back = format::from_bytes(&bytes)?;
    assert_eq!(back, index);
    assert_eq!(back.graph.extract(1, text.len())?, text);

    let mut bad = bytes.clone();
    bad[bytes.len() / 2] ^= 0x40;
    match format::from_bytes(&bad) {
        Err(e @ FormatError::ChecksumMismatch { .. }) => println!("flipped bit: {e}"),
        other => println!("flipped bit: unexpected {other:?}"),
    }
    match format::from_bytes(&bytes[..bytes.len() - 9]) {
        Err(e) => println!("truncated: {e}"),
        Ok(_) => println!("truncated: accepted?"),
    }
    Ok(())
}
