//! How the parse and the graph grow as copies are appended to a corpus.

use blockgraph::corpus::{generate, CorpusConfig};
use blockgraph::format;
use blockgraph::{BlockIndex, BuildConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>7} {:>9} {:>7} {:>9} {:>7}", "copies", "n", "z", "bytes", "ratio");
    for copies in [1, 4, 16, 64] {
        let text = generate(&CorpusConfig {
            base_size: 1 << 13,
            copies,
            subs_per_copy: 2,
            seed: 3,
            ..Default::default()
        });
        let index = BlockIndex::build(&text, BuildConfig::default(), false)?;
        let bytes = format::index_to_bytes(&index).len();
        println!(
            "{copies:>7} {:>9} {:>7} {bytes:>9} {:>7.3}",
            text.len(),
            index.z(),
            bytes as f64 / text.len() as f64
        );
    }
    Ok(())
}
