use std::path::{Path, PathBuf};

use super::manifest::{ExtractConfig, SampleRecord, Status};
use super::scan::sha256_hex;
use crate::entropy::{normalize_minmax, sliding_entropy_with};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grayscale::{bytes_to_matrix, resize_bicubic_with, PixelMatrix};
use crate::imaging::{apply_colormap, entropy_matrix, ColorMap, EncodePng, RgbImage};

pub const ENTROPY_DIR: &str = "entropy";
pub const ENTROPY_RAW_DIR: &str = "entropy_raw";
pub const GRAYSCALE_DIR: &str = "grayscale";

/// Images derived from one byte stream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Artifacts {
    pub entropy_rgb: Option<RgbImage>,
    pub entropy_raw: Option<PixelMatrix>,
    pub gray: Option<PixelMatrix>,
}

/// Pure transform from file contents to images.
pub fn render(data: &[u8], config: &ExtractConfig, exec: Exec) -> Result<Artifacts> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Artifacts::default();
    if config.mode.entropy() {
        let profile = sliding_entropy_with(data, config.entropy, exec)?;
        let mut matrix = entropy_matrix(&normalize_minmax(&profile)?)?;
        if config.resize_entropy {
            matrix = resize_bicubic_with(&matrix, config.image, exec)?;
        }
        out.entropy_rgb = Some(apply_colormap(&matrix, ColorMap::entropy()));
        out.entropy_raw = Some(matrix);
    }
    if config.mode.grayscale() {
        let matrix = bytes_to_matrix(data)?;
        out.gray = Some(resize_bicubic_with(&matrix, config.image, exec)?);
    }
    Ok(out)
}

/// `<dir>/<label>/<sha256>.png`, relative to the output root.
pub fn artifact_path(dir: &str, label: &str, sha256: &str) -> PathBuf {
    Path::new(dir).join(label).join(format!("{sha256}.png"))
}

/// Writes `bytes` unless the file already holds exactly them.
fn write_if_changed(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Ok(existing) = std::fs::read(path) {
        if existing == bytes {
            return Ok(());
        }
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn emit(
    output_root: &Path,
    dir: &str,
    record: &SampleRecord,
    image: &impl EncodePng,
) -> Result<PathBuf> {
    let rel = artifact_path(dir, &record.label, &record.sha256);
    let full = output_root.join(&rel);
    let bytes = image.encode_png().map_err(|e| match e {
        Error::Png { message, .. } => Error::Png {
            path: full.clone(),
            message,
        },
        other => other,
    })?;
    write_if_changed(&full, &bytes)?;
    Ok(rel)
}

fn try_process(
    record: &mut SampleRecord,
    config: &ExtractConfig,
    output_root: &Path,
    exec: Exec,
) -> Result<()> {
    let data = std::fs::read(&record.source_path).map_err(|e| Error::io(&record.source_path, e))?;
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let digest = sha256_hex(&data);
    if digest != record.sha256 {
        return Err(Error::InvalidConfig(format!(
            "{}: content changed since scan",
            record.source_path.display()
        )));
    }
    record.size_bytes = data.len() as u64;

    let art = render(&data, config, exec)?;
    if let Some(img) = &art.entropy_rgb {
        record.entropy_image_path = Some(emit(output_root, ENTROPY_DIR, record, img)?);
    }
    if let Some(img) = &art.entropy_raw {
        record.entropy_raw_path = Some(emit(output_root, ENTROPY_RAW_DIR, record, img)?);
    }
    if let Some(img) = &art.gray {
        record.gray_image_path = Some(emit(output_root, GRAYSCALE_DIR, record, img)?);
    }
    Ok(())
}

/// Produces the configured images for one record.
///
/// Failures are recorded on the returned record rather than propagated:
/// an empty file is `skipped`, any other error is `failed`.
pub fn process_sample(record: &SampleRecord, config: &ExtractConfig, output_root: &Path) -> SampleRecord {
    process_sample_with(record, config, output_root, Exec::default())
}

pub fn process_sample_with(
    record: &SampleRecord,
    config: &ExtractConfig,
    output_root: &Path,
    exec: Exec,
) -> SampleRecord {
    let mut out = SampleRecord {
        status: Status::Pending,
        reason: None,
        window_size: config.mode.entropy().then_some(config.entropy.window_size),
        step: config.mode.entropy().then_some(config.entropy.step),
        entropy_image_path: None,
        entropy_raw_path: None,
        gray_image_path: None,
        ..record.clone()
    };
    match try_process(&mut out, config, output_root, exec) {
        Ok(()) => out.status = Status::Ok,
        Err(e) => {
            out.status = match e {
                Error::EmptyInput => Status::Skipped,
                _ => Status::Failed,
            };
            out.reason = Some(e.to_string());
            out.entropy_image_path = None;
            out.entropy_raw_path = None;
            out.gray_image_path = None;
        }
    }
    out
}
