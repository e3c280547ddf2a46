//! Deterministic synthetic corpora for benchmarks and end-to-end checks.
//!
//! Three byte-level families with distinct statistics:
//! * `random`: uniform bytes throughout, like packed or encrypted payloads.
//! * `sparse`: long zero runs broken by short random bursts.
//! * `text`: ASCII prose in lines, with occasional runs of blank padding.

use std::path::{Path, PathBuf};

use crate::dataset::rng::SplitMix64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Random,
    Sparse,
    Text,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Random, Family::Sparse, Family::Text];

    pub fn name(self) -> &'static str {
        match self {
            Family::Random => "random",
            Family::Sparse => "sparse",
            Family::Text => "text",
        }
    }
}

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "is", "that", "for", "it", "as", "with", "was", "on", "be",
    "at", "by", "this", "had", "not", "are", "but", "from", "or", "have", "an", "they", "which",
    "one", "you", "were", "all", "we", "when", "there", "can", "more", "if", "no", "out", "so",
    "said", "what", "up", "its", "about", "into", "than", "them", "only", "other", "new", "some",
    "could", "time", "these", "two", "may", "then", "first", "any", "like", "now", "my", "such",
    "make", "over", "our", "even", "most", "me", "state", "after", "also", "made", "many", "did",
    "must", "before", "back", "see", "through", "way", "where", "get", "much", "go", "well",
    "your", "know", "should", "down", "work", "year", "because", "come", "people", "just", "each",
    "system", "file", "value", "return", "error", "config", "server", "network", "request",
];

fn fill_random(rng: &mut SplitMix64, out: &mut Vec<u8>, n: usize) {
    let target = out.len() + n;
    while out.len() < target {
        let word = rng.next_u64().to_le_bytes();
        let take = (target - out.len()).min(8);
        out.extend_from_slice(&word[..take]);
    }
}

fn range(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    lo + rng.below((hi - lo + 1) as u64) as usize
}

pub fn generate(family: Family, size: usize, rng: &mut SplitMix64) -> Vec<u8> {
    let mut out = Vec::with_capacity(size + 1024);
    match family {
        Family::Random => fill_random(rng, &mut out, size),
        Family::Sparse => {
            while out.len() < size {
                let zeros = range(rng, 1024, 8192);
                out.resize(out.len() + zeros, 0);
                let burst = range(rng, 128, 1024);
                fill_random(rng, &mut out, burst);
            }
        }
        Family::Text => {
            let mut next_pad = range(rng, 4096, 12288);
            let mut line = 0;
            while out.len() < size {
                if out.len() >= next_pad {
                    let pad = range(rng, 200, 600);
                    for i in 0..pad {
                        out.push(if i % 80 == 79 { b'\n' } else { b' ' });
                    }
                    next_pad = out.len() + range(rng, 4096, 12288);
                    line = 0;
                }
                let word = WORDS[rng.below(WORDS.len() as u64) as usize];
                let capitalize = line == 0 || rng.below(12) == 0;
                for (i, b) in word.bytes().enumerate() {
                    out.push(if capitalize && i == 0 { b.to_ascii_uppercase() } else { b });
                }
                line += word.len() + 1;
                match rng.below(16) {
                    0 => out.push(b','),
                    1 => out.push(b'.'),
                    _ => {}
                }
                if line > range(rng, 60, 80) {
                    out.push(b'\n');
                    line = 0;
                } else {
                    out.push(b' ');
                }
            }
        }
    }
    out.truncate(size);
    out
}

/// Writes `per_class` files of each family under `root/<family>/`.
pub fn write_corpus(
    root: &Path,
    per_class: usize,
    min_size: usize,
    max_size: usize,
    seed: u64,
) -> Result<Vec<PathBuf>> {
    if min_size == 0 || max_size < min_size {
        return Err(Error::InvalidConfig(format!("bad size range {min_size}..={max_size}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut paths = Vec::new();
    for family in Family::ALL {
        let dir = root.join(family.name());
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for i in 0..per_class {
            let size = range(&mut rng, min_size, max_size);
            let body = generate(family, size, &mut rng);
            let path = dir.join(format!("{}_{i:04}.bin", family.name()));
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
    }
    Ok(paths)
}
