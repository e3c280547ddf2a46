//! Byte-to-pixel mapping and bicubic resampling.
//!
//! A byte stream of length `n` is laid out row-major in the smallest square
//! that holds it, zero-filled at the tail. The fill length is kept on the
//! matrix so the original bytes can always be recovered exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;

/// Cubic convolution parameter (Catmull-Rom).
pub const BICUBIC_A: f64 = -0.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMatrix {
    pub side: usize,
    /// Row-major, `side * side` entries.
    pub values: Vec<u8>,
    /// Trailing zero-fill entries that are not part of the source data.
    pub pad_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSpec {
    pub target_side: usize,
}

impl Default for ImageSpec {
    fn default() -> Self {
        ImageSpec { target_side: 256 }
    }
}

/// Smallest `s` with `s * s >= n`.
pub fn square_side(n: usize) -> usize {
    let s = n.isqrt();
    if s * s < n {
        s + 1
    } else {
        s
    }
}

impl PixelMatrix {
    /// Reshapes a 1-D sequence into a zero-padded square.
    pub fn from_sequence(values: &[u8]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let side = square_side(values.len());
        let mut padded = Vec::with_capacity(side * side);
        padded.extend_from_slice(values);
        padded.resize(side * side, 0);
        Ok(PixelMatrix {
            side,
            values: padded,
            pad_len: side * side - values.len(),
        })
    }

    pub fn filled(side: usize, value: u8) -> Self {
        PixelMatrix {
            side,
            values: vec![value; side * side],
            pad_len: 0,
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.side + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.values.chunks(self.side.max(1))
    }
}

pub fn bytes_to_matrix(data: &[u8]) -> Result<PixelMatrix> {
    PixelMatrix::from_sequence(data)
}

/// Inverse of [`bytes_to_matrix`]: strips the recorded zero fill.
pub fn matrix_to_bytes(matrix: &PixelMatrix) -> Result<Vec<u8>> {
    let total = matrix.side * matrix.side;
    if matrix.pad_len >= total || matrix.values.len() != total {
        return Err(Error::InvalidPadding {
            side: matrix.side,
            pad_len: matrix.pad_len,
        });
    }
    Ok(matrix.values[..total - matrix.pad_len].to_vec())
}

fn cubic(x: f64) -> f64 {
    let a = BICUBIC_A;
    let x = x.abs();
    if x <= 1.0 {
        ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
    } else {
        0.0
    }
}

/// Source taps and weights for one output coordinate along one axis.
#[derive(Clone, Copy)]
struct Taps {
    index: [usize; 4],
    weight: [f64; 4],
}

fn axis_taps(src_len: usize, dst_len: usize) -> Vec<Taps> {
    let scale = src_len as f64 / dst_len as f64;
    let last = src_len as isize - 1;
    (0..dst_len)
        .map(|d| {
            let pos = (d as f64 + 0.5) * scale - 0.5;
            let base = pos.floor() as isize;
            let mut t = Taps {
                index: [0; 4],
                weight: [0.0; 4],
            };
            for k in 0..4 {
                let tap = base - 1 + k as isize;
                t.index[k] = tap.clamp(0, last) as usize;
                t.weight[k] = cubic(pos - tap as f64);
            }
            t
        })
        .collect()
}

/// Resamples to `spec.target_side` squared with a 4x4 cubic convolution.
///
/// Pixel centres are aligned, borders are replicated, and each result is
/// clamped to `[0, 255]` before rounding half away from zero.
pub fn resize_bicubic(matrix: &PixelMatrix, spec: ImageSpec) -> Result<PixelMatrix> {
    resize_bicubic_with(matrix, spec, Exec::default())
}

pub fn resize_bicubic_with(matrix: &PixelMatrix, spec: ImageSpec, exec: Exec) -> Result<PixelMatrix> {
    if spec.target_side == 0 {
        return Err(Error::InvalidConfig("target_side must be >= 1".into()));
    }
    if matrix.side == 0 || matrix.values.len() != matrix.side * matrix.side {
        return Err(Error::InvalidConfig(format!(
            "matrix of side {} holds {} values",
            matrix.side,
            matrix.values.len()
        )));
    }
    let out = spec.target_side;
    let taps = axis_taps(matrix.side, out);

    let rows = exec.map(&taps, |ty| {
        let mut row = Vec::with_capacity(out);
        for tx in &taps {
            let mut acc = 0.0;
            for j in 0..4 {
                let src_row = ty.index[j] * matrix.side;
                let mut line = 0.0;
                for i in 0..4 {
                    line += tx.weight[i] * matrix.values[src_row + tx.index[i]] as f64;
                }
                acc += ty.weight[j] * line;
            }
            row.push(acc.clamp(0.0, 255.0).round() as u8);
        }
        row
    });

    Ok(PixelMatrix {
        side: out,
        values: rows.concat(),
        pad_len: 0,
    })
}
