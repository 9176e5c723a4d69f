//! Drop the top of the graph and store one complete level instead.

use blockgraph::builder::{self, level_stats};
use blockgraph::corpus::{generate, CorpusConfig};
use blockgraph::BuildConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = generate(&CorpusConfig {
        base_size: 1 << 12,
        copies: 32,
        mutation_rate: 0.001,
        seed: 9,
        ..Default::default()
    });
    for flat in [0, 3, 6] {
        let g = builder::build(&text, BuildConfig::default().with_flat_top(flat))?;
        let first = &level_stats(&g)[0];
        println!(
            "flat_top={flat}: depth {} stores all {} blocks ({} internal), payload {} bits",
            first.depth,
            first.nodes,
            first.internal,
            g.payload_bits()
        );
        assert_eq!(first.nodes, g.geometry().count(flat));
        assert_eq!(g.extract(100, 400)?, &text[99..400]);
    }
    Ok(())
}
