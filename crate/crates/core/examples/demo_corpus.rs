//! Writes the bundled demo corpus (static site, lexicon, n-best lists,
//! score files and `forge.toml`) into a directory.
//!
//! ```text
//! cargo run --example demo_corpus -- /tmp/demo
//! cd /tmp/demo && forge run
//! ```

#[path = "../tests/common/e2e.rs"]
mod e2e;

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).ok_or_else(|| anyhow::anyhow!("usage: demo_corpus <dir>"))?;
    let utts = e2e::write_demo_corpus(std::path::Path::new(&dir));
    println!("wrote {} utterances to {dir}", utts.len());
    Ok(())
}
