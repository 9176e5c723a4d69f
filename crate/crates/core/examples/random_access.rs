//! Single-character access, with the node path printed.

use blockgraph::builder;
use blockgraph::corpus::fibonacci_word;
use blockgraph::{BuildConfig, Visits};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = fibonacci_word(8);
    let graph = builder::build(&text, BuildConfig::default())?;

    let pos = 11;
    let mut out = Vec::new();
    let mut visits = Visits::tracing();
    graph.extract_into(pos, pos, &mut out, &mut visits)?;
    println!("T[{pos}] = {}", out[0] as char);
    for v in visits.trace.as_deref().unwrap_or_default() {
        let kind = if v.leaf { "leaf" } else { "internal" };
        println!("  depth {} node {} [{}..={}] {kind}", v.depth, v.node, v.lo, v.hi);
    }

    for (i, &c) in text.iter().enumerate() {
        assert_eq!(graph.access(i + 1)?, c);
    }
    println!("all {} positions agree", text.len());
    Ok(())
}
