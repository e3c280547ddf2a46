use std::collections::BTreeMap;
use std::path::Path;

use super::manifest::{ExtractConfig, Manifest, SampleRecord};
use super::process::process_sample_with;
use crate::error::{Error, Result};
use crate::exec::Exec;

fn ensure_writable(root: &Path) -> Result<()> {
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let probe = root.join(".binvis-write-probe");
    std::fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    std::fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Processes every record of `manifest` on a pool of `jobs` workers.
///
/// Records that would write the same artifact (same label and content hash)
/// are handled by one task in manifest order, so no two workers ever touch
/// the same path. The result does not depend on `jobs`.
pub fn run_batch(manifest: &Manifest, config: &ExtractConfig, output_root: &Path, jobs: usize) -> Result<Manifest> {
    run_batch_with(manifest, config, output_root, jobs, Exec::default())
}

pub fn run_batch_with(
    manifest: &Manifest,
    config: &ExtractConfig,
    output_root: &Path,
    jobs: usize,
    exec: Exec,
) -> Result<Manifest> {
    crate::entropy::EntropyConfig::new(config.entropy.window_size, config.entropy.step)?;
    if config.image.target_side == 0 {
        return Err(Error::InvalidConfig("image size must be >= 1".into()));
    }
    ensure_writable(output_root)?;

    let mut groups: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, r) in manifest.records.iter().enumerate() {
        groups.entry((&r.label, &r.sha256)).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    let processed: Vec<Vec<(usize, SampleRecord)>> = exec.install(jobs, || {
        exec.map(&groups, |members| {
            members
                .iter()
                .map(|&i| (i, process_sample_with(&manifest.records[i], config, output_root, exec)))
                .collect()
        })
    });

    let mut records: Vec<Option<SampleRecord>> = vec![None; manifest.len()];
    for (i, rec) in processed.into_iter().flatten() {
        records[i] = Some(rec);
    }
    let mut out = Manifest {
        header: manifest.header.clone(),
        records: records.into_iter().map(|r| r.expect("every record processed")).collect(),
    };
    out.header.config = Some(*config);
    let s = out.summary();
    log::info!("batch done: {} ok, {} skipped, {} failed", s.ok, s.skipped, s.failed);
    Ok(out)
}
