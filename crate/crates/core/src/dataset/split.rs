//! Stratified train/validation/test partitioning.
//!
//! Within each class the records (in manifest order) are permuted with a
//! [`SplitMix64`] stream seeded by `seed ^ fnv1a64(class)`, then cut at the
//! cumulative ratio boundaries. Per-class sizes use largest-remainder
//! rounding, ties going to the earlier split.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::manifest::Manifest;
use super::rng::{fnv1a64, SplitMix64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios(pub [f64; 3]);

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios([0.7, 0.1, 0.2])
    }
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let r = [train, val, test];
        if r.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidRatios(format!("{r:?} must be finite and non-negative")));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRatios(format!("{r:?} sums to {sum}, expected 1")));
        }
        Ok(SplitRatios(r))
    }

    /// Per-split sizes for a class of `n` samples.
    pub fn sizes(&self, n: usize) -> [usize; 3] {
        let targets = self.0.map(|r| r * n as f64);
        // absorb float noise such as 0.7 * 10 = 7.000000000000001
        let mut sizes = targets.map(|t| (t + 1e-9).floor() as usize);
        let assigned: usize = sizes.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = targets[a] - sizes[a] as f64;
            let rb = targets[b] - sizes[b] as f64;
            rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        for &i in order.iter().take(n.saturating_sub(assigned)) {
            sizes[i] += 1;
        }
        sizes
    }
}

impl FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| Error::InvalidRatios(format!("{p:?}: {e}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [a, b, c] => SplitRatios::new(a, b, c),
            _ => Err(Error::InvalidRatios(format!("expected three ratios, got {}", parts.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub source_path: PathBuf,
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitHeader {
    pub seed: u64,
    pub ratios: SplitRatios,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitAssignment {
    pub seed: u64,
    pub ratios: SplitRatios,
    /// Parallel to the manifest records.
    pub entries: Vec<SplitEntry>,
}

pub fn split_dataset(manifest: &Manifest, ratios: SplitRatios, seed: u64) -> Result<SplitAssignment> {
    let ratios = SplitRatios::new(ratios.0[0], ratios.0[1], ratios.0[2])?;
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, r) in manifest.records.iter().enumerate() {
        if r.label.is_empty() {
            return Err(Error::EmptyClass(r.source_path.display().to_string()));
        }
        by_class.entry(&r.label).or_default().push(i);
    }

    let mut assigned = vec![Split::Train; manifest.len()];
    for (class, mut members) in by_class {
        SplitMix64::new(seed ^ fnv1a64(class)).shuffle(&mut members);
        let [train, val, _] = ratios.sizes(members.len());
        for (pos, idx) in members.into_iter().enumerate() {
            assigned[idx] = if pos < train {
                Split::Train
            } else if pos < train + val {
                Split::Val
            } else {
                Split::Test
            };
        }
    }

    let entries = manifest
        .records
        .iter()
        .zip(assigned)
        .map(|(r, split)| SplitEntry {
            source_path: r.source_path.clone(),
            label: r.label.clone(),
            split,
        })
        .collect();
    Ok(SplitAssignment { seed, ratios, entries })
}

impl SplitAssignment {
    pub fn counts(&self) -> BTreeMap<(String, Split), usize> {
        let mut m = BTreeMap::new();
        for e in &self.entries {
            *m.entry((e.label.clone(), e.split)).or_default() += 1;
        }
        m
    }

    pub fn lookup(&self) -> BTreeMap<&Path, Split> {
        self.entries.iter().map(|e| (e.source_path.as_path(), e.split)).collect()
    }

    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &SplitHeader { seed: self.seed, ratios: self.ratios })?;
        w.write_all(b"\n")?;
        for e in &self.entries {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).map_err(|e| Error::io(path, e))?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut header: Option<SplitHeader> = None;
        let mut entries = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            if header.is_none() {
                header = Some(serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e.to_string()))?);
            } else {
                entries.push(serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e.to_string()))?);
            }
        }
        let header = header.ok_or_else(|| parse_err(1, "missing header line".into()))?;
        Ok(SplitAssignment {
            seed: header.seed,
            ratios: header.ratios,
            entries,
        })
    }
}
