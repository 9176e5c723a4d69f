//! Bookmarked extraction: work proportional to the extracted length.

use blockgraph::bookmarks::extract_with_bookmark_into;
use blockgraph::corpus::{generate, CorpusConfig};
use blockgraph::{BlockIndex, BuildConfig, Visits};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = generate(&CorpusConfig {
        base_size: 1 << 14,
        copies: 16,
        mutation_rate: 0.001,
        seed: 42,
        ..Default::default()
    });
    let index = BlockIndex::build(&text, BuildConfig::default(), true)?;
    println!("n={} z={} bookmarks={}", index.len(), index.z(), index.bookmarks.len());

    let bm = &index.bookmarks.as_slice()[index.bookmarks.len() / 2];
    println!("bookmark at {}", bm.pos);
    println!("{:>6} {:>10} {:>10}", "len", "bookmark", "root");
    for len in [1, 4, 16, 64, 256, 1024] {
        let f = bm.pos.saturating_sub(len / 2).max(1);
        let l = (f + len - 1).min(index.len());

        let mut a = Vec::new();
        let mut va = Visits::new();
        extract_with_bookmark_into(&index.graph, bm, f, l, &mut a, &mut va)?;
        let mut b = Vec::new();
        let mut vb = Visits::new();
        index.graph.extract_into(f, l, &mut b, &mut vb)?;

        assert_eq!(a, &text[f - 1..l]);
        assert_eq!(a, b);
        println!("{len:>6} {:>10} {:>10}", va.count, vb.count);
    }
    Ok(())
}
