//! Depth-map writers.

use normcraft_core::integrate::DepthMap;

/// Greyscale PFM: `Pf` header, little-endian `f32` rows from bottom to top.
/// Invalid pixels are NaN.
pub fn encode_pfm(d: &DepthMap) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", d.width, d.height).into_bytes();
    for r in (0..d.height).rev() {
        for c in 0..d.width {
            let v = d.at(r, c).map_or(f32::NAN, |z| z as f32);
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// One line per row, comma separated; invalid pixels are empty cells.
pub fn encode_csv(d: &DepthMap) -> String {
    let mut out = String::new();
    for r in 0..d.height {
        let cells: Vec<String> = (0..d.width)
            .map(|c| d.at(r, c).map(|z| z.to_string()).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
