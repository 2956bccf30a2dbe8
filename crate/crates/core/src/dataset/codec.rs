//! On-disk encodings for images and depth maps.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{DepthMap, Image};

/// Magic bytes opening every depth file.
pub const DEPTH_MAGIC: &[u8; 4] = b"DGF1";
const DEPTH_HEADER_LEN: u64 = 12;

/// PNG sample depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum BitDepth {
    Eight,
    #[default]
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }

    pub fn bits(self) -> u8 {
        u8::from(self)
    }
}

impl From<BitDepth> for u8 {
    fn from(b: BitDepth) -> u8 {
        match b {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }
}

impl TryFrom<u8> for BitDepth {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            _ => Err(format!("unsupported bit depth {v}, expected 8 or 16")),
        }
    }
}

fn quantize(v: f64, max: f64) -> u16 {
    // NaN maps to 0 via the saturating cast
    (v.clamp(0.0, 1.0) * max).round() as u16
}

/// Writes an RGB PNG. Values are clamped to `[0, 1]` and stored as-is; any
/// gamma encoding is the caller's business. `gamma` only fills the gAMA chunk.
pub fn write_png(path: &Path, img: &Image<f64>, bits: BitDepth, gamma: Option<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), img.width(), img.height());
    enc.set_color(png::ColorType::Rgb);
    if let Some(g) = gamma {
        enc.set_source_gamma(png::ScaledFloat::new((1.0 / g) as f32));
    }
    let max = bits.max_value();
    let bytes: Vec<u8> = match bits {
        BitDepth::Eight => {
            enc.set_depth(png::BitDepth::Eight);
            img.data().iter().map(|&v| quantize(v, max) as u8).collect()
        }
        BitDepth::Sixteen => {
            enc.set_depth(png::BitDepth::Sixteen);
            img.data()
                .iter()
                .flat_map(|&v| quantize(v, max).to_be_bytes())
                .collect()
        }
    };
    let to_err = |e: png::EncodingError| Error::CorruptImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut writer = enc.write_header().map_err(to_err)?;
    writer.write_image_data(&bytes).map_err(to_err)?;
    writer.finish().map_err(to_err)
}

/// Reads an 8- or 16-bit RGB PNG into `[0, 1]` values.
pub fn read_png(path: &Path) -> Result<Image<f64>> {
    let corrupt = |reason: String| Error::CorruptImage {
        path: path.to_path_buf(),
        reason,
    };
    let file = File::open(path).map_err(|e| missing_or_io(path, e))?;
    let mut reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| corrupt(e.to_string()))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| corrupt("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| corrupt(e.to_string()))?;
    if info.color_type != png::ColorType::Rgb {
        return Err(corrupt(format!(
            "expected RGB, found {:?}",
            info.color_type
        )));
    }
    let data = &buf[..info.buffer_size()];
    let values: Vec<f64> = match info.bit_depth {
        png::BitDepth::Eight => data.iter().map(|&b| b as f64 / 255.0).collect(),
        png::BitDepth::Sixteen => data
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
            .collect(),
        other => return Err(corrupt(format!("unsupported bit depth {other:?}"))),
    };
    Image::from_raw(info.width, info.height, values).map_err(|e| corrupt(e.to_string()))
}

pub(crate) fn missing_or_io(path: &Path, e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::NotFound {
        Error::MissingFile(path.to_path_buf())
    } else {
        Error::io(path, e)
    }
}

/// Writes `DGF1 | width u32 | height u32 | f32 × W·H`, little-endian,
/// row-major, NaN for invalid pixels.
pub fn write_depth(path: &Path, depth: &DepthMap<f64>) -> Result<()> {
    let mut bytes = Vec::with_capacity(DEPTH_HEADER_LEN as usize + depth.len() * 4);
    bytes.extend_from_slice(DEPTH_MAGIC);
    bytes.extend_from_slice(&depth.width().to_le_bytes());
    bytes.extend_from_slice(&depth.height().to_le_bytes());
    for i in 0..depth.len() {
        let v = depth.get_index(i).map_or(f32::NAN, |d| d as f32);
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

fn parse_header(path: &Path, header: &[u8], file_len: u64) -> Result<(u32, u32)> {
    let corrupt = |reason: String| Error::CorruptDepth {
        path: path.to_path_buf(),
        reason,
    };
    if header.len() < DEPTH_HEADER_LEN as usize {
        return Err(corrupt(format!(
            "file is {file_len} bytes, shorter than the header"
        )));
    }
    if &header[..4] != DEPTH_MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let w = u32::from_le_bytes(header[4..8].try_into().unwrap());
    let h = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let expected = DEPTH_HEADER_LEN + 4 * w as u64 * h as u64;
    if file_len != expected {
        return Err(corrupt(format!(
            "{w}x{h} map needs {expected} bytes, file has {file_len}"
        )));
    }
    Ok((w, h))
}

/// Checks magic and size without reading the payload.
pub fn check_depth_header(path: &Path) -> Result<(u32, u32)> {
    let mut f = File::open(path).map_err(|e| missing_or_io(path, e))?;
    let len = f.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut header = Vec::with_capacity(DEPTH_HEADER_LEN as usize);
    Read::by_ref(&mut f)
        .take(DEPTH_HEADER_LEN)
        .read_to_end(&mut header)
        .map_err(|e| Error::io(path, e))?;
    parse_header(path, &header, len)
}

/// Raw stored values, NaN for invalid pixels.
pub fn read_depth_raw(path: &Path) -> Result<(u32, u32, Vec<f32>)> {
    let bytes = std::fs::read(path).map_err(|e| missing_or_io(path, e))?;
    let (w, h) = parse_header(path, &bytes, bytes.len() as u64)?;
    let values = bytes[DEPTH_HEADER_LEN as usize..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((w, h, values))
}

pub fn read_depth(path: &Path) -> Result<DepthMap<f64>> {
    let (w, h, raw) = read_depth_raw(path)?;
    let mut map = DepthMap::invalid(w, h);
    for (i, v) in raw.into_iter().enumerate() {
        map.set_index(i, (!v.is_nan()).then_some(v as f64));
    }
    Ok(map)
}
