//! 16-bit RGB PNG normal maps.
//!
//! Each component maps to `round((c + 1) / 2 · 65535)`; black is reserved
//! for invalid pixels. 8-bit files are accepted on load with the same
//! mapping at their own depth.

use std::io::Cursor;

use normcraft_core::{NormalMap, Vec3};

fn quantize(c: f64) -> u16 {
    ((c + 1.0) * 0.5 * 65535.0).round().clamp(0.0, 65535.0) as u16
}

fn dequantize(v: u32, max: f64) -> f64 {
    v as f64 / max * 2.0 - 1.0
}

pub fn encode(map: &NormalMap) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, map.width() as u32, map.height() as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut writer = enc.write_header().map_err(|e| e.to_string())?;
        let mut samples = Vec::with_capacity(map.len() * 6);
        for (v, &m) in map.data().iter().zip(map.mask()) {
            for c in v.to_array() {
                let q = if m { quantize(c) } else { 0 };
                samples.extend_from_slice(&q.to_be_bytes());
            }
        }
        writer.write_image_data(&samples).map_err(|e| e.to_string())?;
        writer.finish().map_err(|e| e.to_string())?;
    }
    Ok(out)
}

/// Decoded map and the number of valid pixels off unit length by more than
/// `1e-3` before renormalization.
pub fn decode(bytes: &[u8]) -> Result<(NormalMap, usize), String> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or("image too large")?];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let channels = match info.color_type {
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => return Err(format!("expected an RGB image, found {other:?}")),
    };
    let (width, height) = (info.width as usize, info.height as usize);
    let (bytes_per_sample, max) = match info.bit_depth {
        png::BitDepth::Sixteen => (2, 65535.0),
        png::BitDepth::Eight => (1, 255.0),
        other => return Err(format!("unsupported bit depth {other:?}")),
    };
    let read = |at: usize| -> u32 {
        if bytes_per_sample == 2 {
            u16::from_be_bytes([buf[at], buf[at + 1]]) as u32
        } else {
            buf[at] as u32
        }
    };
    let mut data = Vec::with_capacity(width * height);
    let mut mask = Vec::with_capacity(width * height);
    let mut off_unit = 0;
    for p in 0..width * height {
        let base = (p / width) * info.line_size + (p % width) * channels * bytes_per_sample;
        let raw = [read(base), read(base + bytes_per_sample), read(base + 2 * bytes_per_sample)];
        if raw == [0, 0, 0] {
            data.push(Vec3::ZERO);
            mask.push(false);
            continue;
        }
        let v = Vec3::new(dequantize(raw[0], max), dequantize(raw[1], max), dequantize(raw[2], max));
        let len = v.norm();
        if len < 1e-8 {
            return Err(format!("pixel ({}, {}) decodes to a zero vector", p / width, p % width));
        }
        if (len - 1.0).abs() > super::nrm::UNIT_WARNING {
            off_unit += 1;
        }
        data.push(v * (1.0 / len));
        mask.push(true);
    }
    let map = NormalMap::new(width, height, data, mask).map_err(|e| e.to_string())?;
    Ok((map, off_unit))
}

/// Mask of the pixels with any non-zero sample, for greyscale or colour
/// images of any bit depth.
pub fn decode_mask(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>), String> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or("image too large")?];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let (width, height) = (info.width as usize, info.height as usize);
    let pixel_bytes = info.line_size / width;
    let mask = (0..width * height)
        .map(|p| {
            let start = (p / width) * info.line_size + (p % width) * pixel_bytes;
            buf[start..start + pixel_bytes].iter().any(|&b| b != 0)
        })
        .collect();
    Ok((width, height, mask))
}
