use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::manifest::{Manifest, SampleRecord};
use crate::error::{Error, Result};
use crate::exec::Exec;

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

fn hash_file(path: &Path) -> Result<(String, u64)> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), total))
}

/// Walks a class-per-directory tree. Each regular file below a class folder
/// becomes a record labeled with its immediate parent directory name.
pub fn scan_dataset(root: &Path) -> Result<Manifest> {
    scan_dataset_with(root, Exec::default())
}

pub fn scan_dataset_with(root: &Path, exec: Exec) -> Result<Manifest> {
    let meta = std::fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        ));
    }
    std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;

    let mut warnings = Vec::new();
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for entry in WalkDir::new(root).min_depth(1).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.depth() == 1 {
            warnings.push(format!("ignoring unlabeled file {}", entry.path().display()));
            continue;
        }
        let label = entry
            .path()
            .parent()
            .and_then(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        files.push((entry.into_path(), label));
    }

    let hashed = exec.map(&files, |(path, _)| hash_file(path));
    let mut records = Vec::with_capacity(files.len());
    for ((path, label), hashed) in files.into_iter().zip(hashed) {
        let (sha256, size) = hashed?;
        records.push(SampleRecord::new(path, label, sha256, size));
    }

    let mut manifest = Manifest::new(records);
    if manifest.is_empty() {
        warnings.push(format!("no samples found under {}", root.display()));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    manifest.header.warnings = warnings;
    Ok(manifest)
}
