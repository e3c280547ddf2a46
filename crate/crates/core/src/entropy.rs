//! Sliding-window Shannon entropy over raw bytes.
//!
//! Each window is reduced to a 256-bin byte histogram and scored in bits per
//! byte, so every value lies in `[0, 8]`. Profiles are min-max normalized per
//! file into the `0..=255` intensity range used for imaging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Windows handed to one worker; the histogram slides within a chunk.
const WINDOWS_PER_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyConfig {
    pub window_size: usize,
    pub step: usize,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            window_size: 256,
            step: 256,
        }
    }
}

impl EntropyConfig {
    pub fn new(window_size: usize, step: usize) -> Result<Self> {
        if window_size == 0 || step == 0 {
            return Err(Error::InvalidConfig(format!(
                "window_size ({window_size}) and step ({step}) must be >= 1"
            )));
        }
        Ok(EntropyConfig { window_size, step })
    }

    /// Number of windows produced for an input of `n` bytes.
    ///
    /// Trailing bytes that do not fill a full window are dropped; an input
    /// shorter than one window yields a single whole-input window.
    pub fn window_count(&self, n: usize) -> usize {
        match n {
            0 => 0,
            n if n < self.window_size => 1,
            n => (n - self.window_size) / self.step + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    pub values: Vec<f64>,
    pub config: EntropyConfig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedProfile {
    pub values: Vec<u8>,
}

type Histogram = [u32; 256];

fn histogram(bytes: &[u8]) -> Histogram {
    let mut counts = [0u32; 256];
    for &b in bytes {
        counts[b as usize] += 1;
    }
    counts
}

fn entropy_of_counts(counts: &Histogram, len: usize) -> f64 {
    let len = len as f64;
    let mut h = 0.0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        let p = c as f64 / len;
        h -= p * p.log2();
    }
    // -0.0 for single-symbol windows
    h.max(0.0)
}

/// Shannon entropy of one window in bits per byte.
pub fn shannon_entropy(window: &[u8]) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(entropy_of_counts(&histogram(window), window.len()))
}

pub fn sliding_entropy(data: &[u8], config: EntropyConfig) -> Result<EntropyProfile> {
    sliding_entropy_with(data, config, Exec::default())
}

pub fn sliding_entropy_with(
    data: &[u8],
    config: EntropyConfig,
    exec: Exec,
) -> Result<EntropyProfile> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let EntropyConfig { window_size, step } = EntropyConfig::new(config.window_size, config.step)?;

    if data.len() < window_size {
        return Ok(EntropyProfile {
            values: vec![shannon_entropy(data)?],
            config,
        });
    }

    let count = config.window_count(data.len());
    let chunks = count.div_ceil(WINDOWS_PER_CHUNK);
    let per_chunk = exec.map_range(chunks, |chunk| {
        let first = chunk * WINDOWS_PER_CHUNK;
        let last = (first + WINDOWS_PER_CHUNK).min(count);
        let mut out = Vec::with_capacity(last - first);
        let mut counts = [0u32; 256];
        for idx in first..last {
            let offset = idx * step;
            if idx == first || step >= window_size {
                counts = histogram(&data[offset..offset + window_size]);
            } else {
                let prev = offset - step;
                for &b in &data[prev..offset] {
                    counts[b as usize] -= 1;
                }
                for &b in &data[prev + window_size..offset + window_size] {
                    counts[b as usize] += 1;
                }
            }
            out.push(entropy_of_counts(&counts, window_size));
        }
        out
    });

    Ok(EntropyProfile {
        values: per_chunk.into_iter().flatten().collect(),
        config,
    })
}

/// Min-max scales a profile into `0..=255`, rounding half away from zero.
///
/// A flat profile (max == min) maps to all zeros.
pub fn normalize_minmax(profile: &EntropyProfile) -> Result<NormalizedProfile> {
    let first = *profile.values.first().ok_or(Error::EmptyProfile)?;
    let (min, max) = profile
        .values
        .iter()
        .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = max - min;
    let values = if range > 0.0 {
        profile
            .values
            .iter()
            .map(|&v| ((v - min) / range * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    } else {
        vec![0; profile.values.len()]
    };
    Ok(NormalizedProfile { values })
}
