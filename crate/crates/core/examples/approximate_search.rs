//! Approximate pattern matching with k differences on a compressed index.

use blockgraph::corpus::{generate, CorpusConfig};
use blockgraph::matcher::{extraction_budget, search_with, Engine, SearchStats};
use blockgraph::{BlockIndex, BuildConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = generate(&CorpusConfig {
        base_size: 2000,
        copies: 20,
        mutation_rate: 0.01,
        seed: 5,
        ..Default::default()
    });
    let index = BlockIndex::build(&text, BuildConfig::default(), true)?;
    let pattern = text[1500..1520].to_vec();

    for k in 0..=3 {
        let mut stats = SearchStats::default();
        let hits = search_with(
            &index.graph,
            &index.bookmarks,
            &index.phrases,
            &pattern,
            k,
            Engine::DiagonalTransition,
            &mut stats,
        )?;
        let budget = extraction_budget(pattern.len(), k, index.z());
        println!(
            "k={k}: {} ends ({} primary), extracted {} of budget {budget}",
            hits.len(),
            stats.primary,
            stats.extracted_chars
        );
        if let Some(m) = hits.iter().min_by_key(|m| m.dist) {
            let s = &text[m.witness_start - 1..m.end];
            println!("  e.g. end {} dist {}: {}", m.end, m.dist, String::from_utf8_lossy(s));
        }
    }
    Ok(())
}
