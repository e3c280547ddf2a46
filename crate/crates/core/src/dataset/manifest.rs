//! The dataset ledger: one JSON header line followed by one JSON record per line.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyConfig;
use crate::error::{Error, Result};
use crate::grayscale::ImageSpec;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Entropy,
    Grayscale,
    Both,
}

impl Mode {
    pub fn entropy(self) -> bool {
        matches!(self, Mode::Entropy | Mode::Both)
    }

    pub fn grayscale(self) -> bool {
        matches!(self, Mode::Grayscale | Mode::Both)
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Mode::Entropy),
            "grayscale" => Ok(Mode::Grayscale),
            "both" => Ok(Mode::Both),
            other => Err(Error::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// Everything that determines the bytes of the produced artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub mode: Mode,
    pub entropy: EntropyConfig,
    pub image: ImageSpec,
    /// Also resample entropy images to `image.target_side`.
    pub resize_entropy: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            mode: Mode::Both,
            entropy: EntropyConfig::default(),
            image: ImageSpec::default(),
            resize_entropy: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Ok,
    Skipped,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pending => "pending",
            Status::Ok => "ok",
            Status::Skipped => "skipped",
            Status::Failed => "failed",
        };
        f.write_str(s)
    }
}

/// One labeled input file and the artifacts produced from it.
///
/// Artifact paths are relative to the output root so a manifest does not
/// depend on where the images were written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub source_path: PathBuf,
    pub label: String,
    pub sha256: String,
    pub size_bytes: u64,
    pub status: Status,
    pub reason: Option<String>,
    pub window_size: Option<usize>,
    pub step: Option<usize>,
    /// Colormapped RGB entropy image.
    pub entropy_image_path: Option<PathBuf>,
    /// Single-channel normalized entropy image.
    pub entropy_raw_path: Option<PathBuf>,
    pub gray_image_path: Option<PathBuf>,
}

impl SampleRecord {
    pub fn new(source_path: PathBuf, label: String, sha256: String, size_bytes: u64) -> Self {
        SampleRecord {
            source_path,
            label,
            sha256,
            size_bytes,
            status: Status::Pending,
            reason: None,
            window_size: None,
            step: None,
            entropy_image_path: None,
            entropy_raw_path: None,
            gray_image_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub tool_version: String,
    pub config: Option<ExtractConfig>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub header: ManifestHeader,
    /// Sorted by `source_path`, no duplicates.
    pub records: Vec<SampleRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub ok: usize,
    pub skipped: usize,
    pub failed: usize,
    pub pending: usize,
}

impl Manifest {
    pub fn new(mut records: Vec<SampleRecord>) -> Self {
        records.sort_by(|a, b| a.source_path.cmp(&b.source_path));
        records.dedup_by(|a, b| a.source_path == b.source_path);
        Manifest {
            header: ManifestHeader {
                tool_version: TOOL_VERSION.to_string(),
                ..Default::default()
            },
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for r in &self.records {
            match r.status {
                Status::Ok => s.ok += 1,
                Status::Skipped => s.skipped += 1,
                Status::Failed => s.failed += 1,
                Status::Pending => s.pending += 1,
            }
        }
        s
    }

    pub fn to_writer(&self, mut w: impl Write) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.to_writer(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), path)
    }

    pub fn from_reader(reader: impl BufRead, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut header = None;
        let mut records: Vec<SampleRecord> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            if header.is_none() {
                header = Some(
                    serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e.to_string()))?,
                );
                continue;
            }
            let record: SampleRecord =
                serde_json::from_str(&line).map_err(|e| parse_err(idx + 1, e.to_string()))?;
            if record.label.is_empty() {
                return Err(parse_err(idx + 1, "empty label".into()));
            }
            if let Some(prev) = records.last() {
                if prev.source_path >= record.source_path {
                    return Err(parse_err(
                        idx + 1,
                        format!("records not strictly sorted at {}", record.source_path.display()),
                    ));
                }
            }
            records.push(record);
        }
        Ok(Manifest {
            header: header.ok_or_else(|| parse_err(1, "missing header line".into()))?,
            records,
        })
    }
}
