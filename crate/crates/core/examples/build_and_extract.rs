//! Build a block graph over a Fibonacci word and pull substrings back out.

use blockgraph::builder::{self, level_stats};
use blockgraph::corpus::fibonacci_word;
use blockgraph::BuildConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = fibonacci_word(8);
    let graph = builder::build(&text, BuildConfig::default())?;
    let report = builder::validate(&graph, &text)?;

    println!("text  {}", String::from_utf8_lossy(&text));
    println!("n={} z={} height={}", graph.len(), report.z, graph.height());
    for l in level_stats(&graph) {
        println!(
            "  depth {} block {:>2}: {} internal, {} leaves",
            l.depth, l.block_len, l.internal, l.leaves
        );
    }

    let slice = graph.extract(9, 12)?;
    println!("extract(9, 12) = {}", String::from_utf8_lossy(&slice));
    assert_eq!(slice, &text[8..12]);
    assert_eq!(graph.extract(1, text.len())?, text);
    Ok(())
}
