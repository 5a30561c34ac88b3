//! Height-field triangulation and OBJ export.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::DepthMap;

/// Triangle mesh with 0-based face indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Writes ASCII OBJ: `v` lines in vertex order, then 1-indexed `f` lines.
    pub fn write_obj<W: fmt::Write>(&self, out: &mut W) -> fmt::Result {
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

/// One vertex per valid pixel at `(col, row, z) · scale`, in row-major
/// order, and two triangles for every 2×2 block whose corners are all valid.
/// Triangles wind counter-clockwise seen from `+z`.
pub fn depth_to_mesh(d: &DepthMap, scale: f64) -> Mesh {
    let (w, h) = (d.width, d.height);
    let mut index = vec![usize::MAX; w * h];
    let mut vertices = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if d.mask[i] {
                index[i] = vertices.len();
                vertices.push([c as f64 * scale, r as f64 * scale, d.z[i] * scale]);
            }
        }
    }
    let mut faces = Vec::new();
    for r in 0..h.saturating_sub(1) {
        for c in 0..w.saturating_sub(1) {
            let i = r * w + c;
            let (v00, v01, v10, v11) = (index[i], index[i + 1], index[i + w], index[i + w + 1]);
            if [v00, v01, v10, v11].contains(&usize::MAX) {
                continue;
            }
            faces.push([v00, v01, v10]);
            faces.push([v01, v11, v10]);
        }
    }
    Mesh { vertices, faces }
}
