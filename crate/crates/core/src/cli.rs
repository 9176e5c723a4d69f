//! Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::builder::{self, level_stats, BuildConfig};
use crate::corpus::{self, CorpusConfig};
use crate::format;
use crate::matcher::MatchError;
use crate::text_index::TextIndex;
use crate::{bench, BlockIndex, Error};

#[derive(Debug, Parser)]
#[command(name = "blockgraph", version, about = "Block graphs for highly repetitive texts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a BG01 index from a text file.
    Build {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Block length of the deepest, explicitly stored level.
        #[arg(long, default_value_t = 4)]
        trunc: usize,
        /// Store levels from this depth down, the first one complete.
        #[arg(long, default_value_t = 0)]
        flat_top: usize,
        /// Add a bookmark at every phrase boundary (needed by `search`).
        #[arg(long)]
        bookmark_boundaries: bool,
    },
    /// Write text[from..=to] (1-based) to standard output.
    Extract {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
    /// Write the character at a 1-based position to standard output.
    Access {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        pos: usize,
    },
    /// Report every end position within edit distance k of a pattern.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, conflicts_with = "pattern_file", required_unless_present = "pattern_file")]
        pattern: Option<String>,
        #[arg(long)]
        pattern_file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        format: OutputFormat,
    },
    /// Generate a repetitive corpus: a random base and mutated copies.
    GenCorpus {
        #[arg(long)]
        base_size: usize,
        #[arg(long)]
        copies: usize,
        #[arg(long, default_value_t = 0.0)]
        mutation_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 4)]
        alphabet: usize,
        #[arg(long, default_value_t = 0.0)]
        indel_rate: f64,
        /// Exact number of substitutions per copy.
        #[arg(long, default_value_t = 0)]
        subs_per_copy: usize,
    },
    /// Print the size breakdown and per-level counts of an index.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
    /// Time random extractions and write a CSV summary.
    Bench {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        queries: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long)]
        bookmarked: bool,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<BlockIndex, Failure> {
    let file = File::open(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    format::load(std::io::BufReader::new(file)).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Build {
            input,
            output,
            trunc,
            flat_top,
            bookmark_boundaries,
        } => {
            let text = std::fs::read(&input).map_err(|e| Failure::Runtime(format!("{}: {e}", input.display())))?;
            if text.is_empty() {
                return Err(Failure::Runtime("empty input".into()));
            }
            let config = BuildConfig {
                truncate_block_len: trunc,
                flat_top_depth: flat_top,
            };
            let ti = TextIndex::new(&text).map_err(Error::from)?;
            let index = BlockIndex::build_with_index(&text, &ti, config, bookmark_boundaries)?;
            builder::validate_with(&index.graph, &text, &ti, &index.phrases).map_err(Error::from)?;
            drop(ti);
            let file = File::create(&output).map_err(|e| Failure::Runtime(format!("{}: {e}", output.display())))?;
            let bytes = format::save_index(&index, BufWriter::new(file)).map_err(Error::from)?;
            writeln!(out, "n={}", index.len())?;
            writeln!(out, "z={}", index.z())?;
            print_levels(&index, out)?;
            writeln!(out, "bookmarks={}", index.bookmarks.len())?;
            writeln!(out, "bytes={bytes}")?;
            writeln!(out, "bits_per_char={:.4}", 8.0 * bytes as f64 / index.len() as f64)?;
        }
        Command::Extract { index, from, to } => {
            let idx = load(&index)?;
            let bytes = idx.graph.extract(from, to).map_err(Error::from)?;
            out.write_all(&bytes)?;
        }
        Command::Access { index, pos } => {
            let idx = load(&index)?;
            let c = idx.graph.access(pos).map_err(Error::from)?;
            out.write_all(&[c])?;
        }
        Command::Search {
            index,
            pattern,
            pattern_file,
            k,
            format: fmt,
        } => {
            let pattern = match (pattern, pattern_file) {
                (Some(p), _) => p.into_bytes(),
                (None, Some(f)) => {
                    let mut p = std::fs::read(&f).map_err(|e| Failure::Runtime(format!("{}: {e}", f.display())))?;
                    if p.last() == Some(&b'\n') {
                        p.pop();
                    }
                    p
                }
                (None, None) => return Err(Failure::Usage("a pattern is required".into())),
            };
            if pattern.is_empty() {
                return Err(Failure::Usage("empty pattern".into()));
            }
            if k > pattern.len() {
                return Err(Failure::Usage(format!("k = {k} exceeds the pattern length {}", pattern.len())));
            }
            let idx = load(&index)?;
            if idx.z() > 1 && idx.bookmarks.is_empty() {
                return Err(Failure::Runtime(
                    "index has no boundary bookmarks; rebuild it with --bookmark-boundaries".into(),
                ));
            }
            let matches = idx.search(&pattern, k).map_err(|e| match e {
                MatchError::KExceedsM { .. } | MatchError::EmptyPattern => Failure::Usage(e.to_string()),
                other => Failure::Runtime(other.to_string()),
            })?;
            match fmt {
                OutputFormat::Tsv => {
                    for m in &matches {
                        writeln!(out, "{}\t{}\t{}", m.end, m.dist, m.witness_start)?;
                    }
                }
                OutputFormat::Json => {
                    serde_json::to_writer(&mut *out, &matches).map_err(|e| Failure::Runtime(e.to_string()))?;
                    writeln!(out)?;
                }
            }
        }
        Command::GenCorpus {
            base_size,
            copies,
            mutation_rate,
            seed,
            output,
            alphabet,
            indel_rate,
            subs_per_copy,
        } => {
            if base_size == 0 || copies == 0 {
                return Err(Failure::Usage("--base-size and --copies must be at least 1".into()));
            }
            for (name, r) in [("--mutation-rate", mutation_rate), ("--indel-rate", indel_rate)] {
                if !(0.0..=1.0).contains(&r) {
                    return Err(Failure::Usage(format!("{name} must lie in [0, 1]")));
                }
            }
            if alphabet == 0 || alphabet > 256 {
                return Err(Failure::Usage("--alphabet must lie in 1..=256".into()));
            }
            let text = corpus::generate(&CorpusConfig {
                base_size,
                copies,
                mutation_rate,
                indel_rate,
                subs_per_copy,
                alphabet,
                seed,
            });
            std::fs::write(&output, &text).map_err(|e| Failure::Runtime(format!("{}: {e}", output.display())))?;
            writeln!(err, "wrote {} bytes to {}", text.len(), output.display())?;
        }
        Command::Stats { index } => {
            let idx = load(&index)?;
            let s = format::section_sizes(&idx.graph, &idx.phrases, &idx.bookmarks);
            writeln!(out, "n={}", idx.len())?;
            writeln!(out, "z={}", idx.z())?;
            writeln!(out, "height={}", idx.graph.height())?;
            writeln!(out, "trunc_depth={}", idx.graph.trunc_depth())?;
            writeln!(out, "flat_top_depth={}", idx.graph.flat_top_depth())?;
            writeln!(out, "bookmarks={}", idx.bookmarks.len())?;
            writeln!(out, "section header {}", s.header)?;
            writeln!(out, "section levels {}", s.levels)?;
            writeln!(out, "section truncated_text {}", s.truncated_text)?;
            writeln!(out, "section phrases {}", s.phrases)?;
            writeln!(out, "section bookmarks {}", s.bookmarks)?;
            writeln!(out, "section checksum {}", s.checksum)?;
            writeln!(out, "total {}", s.total())?;
            print_levels(&idx, out)?;
        }
        Command::Bench {
            index,
            queries,
            lengths,
            bookmarked,
            csv,
            seed,
        } => {
            let idx = load(&index)?;
            if bookmarked && idx.bookmarks.is_empty() {
                return Err(Failure::Runtime("index has no bookmarks".into()));
            }
            let rows = bench::run(&idx.graph, bookmarked.then_some(&idx.bookmarks), queries, &lengths, seed);
            let file = File::create(&csv).map_err(|e| Failure::Runtime(format!("{}: {e}", csv.display())))?;
            let mut w = BufWriter::new(file);
            bench::write_csv(&rows, &mut w)?;
            w.flush()?;
            bench::write_csv(&rows, &mut *out)?;
        }
    }
    Ok(())
}

fn print_levels(idx: &BlockIndex, out: &mut dyn Write) -> std::io::Result<()> {
    for l in level_stats(&idx.graph) {
        writeln!(
            out,
            "depth {} block={} nodes={} internal={} leaves={} slots={}",
            l.depth, l.block_len, l.nodes, l.internal, l.leaves, l.slots
        )?;
    }
    Ok(())
}
