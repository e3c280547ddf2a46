//! Colormapping and PNG encoding.

use std::io::Cursor;
use std::path::Path;
use std::sync::OnceLock;

use crate::entropy::NormalizedProfile;
use crate::error::{Error, Result};
use crate::grayscale::PixelMatrix;

/// Control points of the default map: dark purple, blue, teal, green, yellow.
pub const DEFAULT_CONTROL_POINTS: [[u8; 3]; 5] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
];

const DEFAULT_TABLE: &str = include_str!("../data/colormap.csv");

/// 256-entry intensity to RGB lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorMap {
    pub table: [[u8; 3]; 256],
}

impl ColorMap {
    /// The shipped low-purple to high-yellow map.
    pub fn entropy() -> &'static ColorMap {
        static MAP: OnceLock<ColorMap> = OnceLock::new();
        MAP.get_or_init(|| ColorMap::parse_csv(DEFAULT_TABLE).expect("bundled colormap is valid"))
    }

    /// Piecewise-linear interpolation through evenly spaced control points.
    pub fn from_control_points(points: &[[u8; 3]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfig("colormap needs at least two control points".into()));
        }
        let segments = points.len() - 1;
        let mut table = [[0u8; 3]; 256];
        for (i, entry) in table.iter_mut().enumerate() {
            let t = (i as f64 / 255.0) * segments as f64;
            let seg = (t.floor() as usize).min(segments - 1);
            let f = t - seg as f64;
            let (a, b) = (points[seg], points[seg + 1]);
            for k in 0..3 {
                let (lo, hi) = (a[k] as f64, b[k] as f64);
                entry[k] = (lo + (hi - lo) * f).round() as u8;
            }
        }
        Ok(ColorMap { table })
    }

    /// One `r,g,b` line per index, 256 lines.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: "colormap".into(),
            line,
            message,
        };
        let mut table = [[0u8; 3]; 256];
        let mut count = 0;
        for (n, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            if n >= 256 {
                return Err(bad(n + 1, "more than 256 entries".into()));
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad(n + 1, format!("expected r,g,b, got {line:?}")));
            }
            for (k, p) in parts.iter().enumerate() {
                table[n][k] = p.parse().map_err(|e| bad(n + 1, format!("{p:?}: {e}")))?;
            }
            count += 1;
        }
        if count != 256 {
            return Err(bad(count, format!("expected 256 entries, got {count}")));
        }
        Ok(ColorMap { table })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub side: usize,
    pub pixels: Vec<[u8; 3]>,
}

/// Reshapes normalized entropies into a zero-padded square.
pub fn entropy_matrix(profile: &NormalizedProfile) -> Result<PixelMatrix> {
    PixelMatrix::from_sequence(&profile.values).map_err(|_| Error::EmptyProfile)
}

pub fn apply_colormap(matrix: &PixelMatrix, map: &ColorMap) -> RgbImage {
    RgbImage {
        side: matrix.side,
        pixels: matrix.values.iter().map(|&v| map.table[v as usize]).collect(),
    }
}

/// Deterministic PNG encoding: fixed filter and compression level, no metadata chunks.
pub trait EncodePng {
    fn encode_png(&self) -> Result<Vec<u8>>;
}

fn encode(side: usize, color: png::ColorType, data: &[u8]) -> Result<Vec<u8>> {
    let png_err = |e: png::EncodingError| Error::Png {
        path: "<memory>".into(),
        message: e.to_string(),
    };
    let dim = u32::try_from(side)
        .map_err(|_| Error::InvalidConfig(format!("image side {side} too large")))?;
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(Cursor::new(&mut out), dim, dim);
        encoder.set_color(color);
        encoder.set_depth(png::BitDepth::Eight);
        encoder.set_compression(png::Compression::Balanced);
        encoder.set_filter(png::Filter::Paeth);
        let mut writer = encoder.write_header().map_err(png_err)?;
        writer.write_image_data(data).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

impl EncodePng for PixelMatrix {
    fn encode_png(&self) -> Result<Vec<u8>> {
        encode(self.side, png::ColorType::Grayscale, &self.values)
    }
}

impl EncodePng for RgbImage {
    fn encode_png(&self) -> Result<Vec<u8>> {
        encode(self.side, png::ColorType::Rgb, self.pixels.as_flattened())
    }
}

pub fn write_png(path: &Path, image: &impl EncodePng) -> Result<()> {
    let bytes = image.encode_png().map_err(|e| match e {
        Error::Png { message, .. } => Error::Png {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads an 8-bit single-channel square PNG back into a matrix.
pub fn read_gray_png(path: &Path) -> Result<PixelMatrix> {
    let png_err = |message: String| Error::Png {
        path: path.to_path_buf(),
        message,
    };
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(std::io::BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| png_err(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| png_err("image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| png_err(e.to_string()))?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(png_err(format!(
            "expected 8-bit grayscale, got {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    if info.width != info.height {
        return Err(png_err(format!("not square: {}x{}", info.width, info.height)));
    }
    buf.truncate(info.buffer_size());
    Ok(PixelMatrix {
        side: info.width as usize,
        values: buf,
        pad_len: 0,
    })
}
