//! `.nrm`: a little-endian binary normal map.
//!
//! ```text
//! "NRM1" | width u32 | height u32 | layout u32 | payload
//! ```
//!
//! Layout 1 stores `f32` triples row-major, layout 2 stores `f64` triples.
//! An all-zero triple marks an invalid pixel. Other pixels are renormalized
//! on load.

use normcraft_core::{NormalMap, Vec3};

pub const MAGIC: &[u8; 4] = b"NRM1";
const HEADER_LEN: usize = 16;

/// Pixels further than this from unit length are reported on load.
pub const UNIT_WARNING: f64 = 1e-3;

/// Sample type of the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Layout 1, the interchange default.
    #[default]
    F32,
    /// Layout 2, lossless for in-memory maps.
    F64,
}

impl Precision {
    fn layout(self) -> u32 {
        match self {
            Precision::F32 => 1,
            Precision::F64 => 2,
        }
    }

    fn sample_len(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub map: NormalMap,
    pub precision: Precision,
    /// Valid pixels whose stored length was off unit by more than
    /// [`UNIT_WARNING`] before renormalization.
    pub off_unit: usize,
}

pub fn encode(map: &NormalMap, precision: Precision) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + map.len() * 3 * precision.sample_len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(map.width() as u32).to_le_bytes());
    out.extend_from_slice(&(map.height() as u32).to_le_bytes());
    out.extend_from_slice(&precision.layout().to_le_bytes());
    for v in map.data() {
        for c in v.to_array() {
            match precision {
                Precision::F32 => out.extend_from_slice(&(c as f32).to_le_bytes()),
                Precision::F64 => out.extend_from_slice(&c.to_le_bytes()),
            }
        }
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("four bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<Decoded, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!("file is {} bytes, shorter than the header", bytes.len()));
    }
    if &bytes[..4] != MAGIC {
        return Err("bad magic, not an NRM1 file".into());
    }
    let width = u32_at(bytes, 4) as usize;
    let height = u32_at(bytes, 8) as usize;
    let precision = match u32_at(bytes, 12) {
        1 => Precision::F32,
        2 => Precision::F64,
        other => return Err(format!("unknown layout {other}")),
    };
    if width == 0 || height == 0 {
        return Err(format!("empty image {width}x{height}"));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3 * precision.sample_len()))
        .ok_or_else(|| format!("dimensions {width}x{height} overflow"))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != expected {
        return Err(format!(
            "payload is {} bytes, expected {expected} for {width}x{height}",
            payload.len()
        ));
    }

    let sample = |i: usize| -> f64 {
        match precision {
            Precision::F32 => f32::from_le_bytes(payload[4 * i..4 * i + 4].try_into().expect("4 bytes")) as f64,
            Precision::F64 => f64::from_le_bytes(payload[8 * i..8 * i + 8].try_into().expect("8 bytes")),
        }
    };
    let mut data = Vec::with_capacity(width * height);
    let mut mask = Vec::with_capacity(width * height);
    let mut off_unit = 0;
    for p in 0..width * height {
        let v = Vec3::new(sample(3 * p), sample(3 * p + 1), sample(3 * p + 2));
        if v.is_zero() {
            data.push(Vec3::ZERO);
            mask.push(false);
            continue;
        }
        let len = v.norm();
        if !len.is_finite() || len < 1e-8 {
            return Err(format!("pixel ({}, {}) has length {len}", p / width, p % width));
        }
        if (len - 1.0).abs() > UNIT_WARNING {
            off_unit += 1;
        }
        data.push(v * (1.0 / len));
        mask.push(true);
    }
    let map = NormalMap::new(width, height, data, mask).map_err(|e| e.to_string())?;
    Ok(Decoded {
        map,
        precision,
        off_unit,
    })
}
