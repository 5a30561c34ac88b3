//! Normals to depth.
//!
//! Slopes are read off the normals, `p = ∂z/∂x = -nx/nz`, `q = ∂z/∂y = -ny/nz`
//! with `x` along columns and `y` along rows. Both integrators solve the same
//! least-squares problem: every pair of 4-neighbours `(i, j)` should differ
//! by the mean of their slopes along the edge, `z_j - z_i = (g_i + g_j)/2`.
//! The result is defined up to a constant and reported mean-centred.
//!
//! * [`integrate_frankot`] – spectral solve on the full frame (`std` only).
//! * [`integrate_poisson`] – conjugate gradient on an arbitrary mask.

#[cfg(feature = "std")]
mod frankot;
mod mesh;
mod poisson;

#[cfg(feature = "std")]
pub use frankot::integrate_frankot;
pub use mesh::{depth_to_mesh, Mesh};
pub use poisson::{integrate_poisson, PoissonOptions};

use alloc::vec::Vec;

use crate::normal::NormalMap;

/// Lower bound on `nz` when dividing by it.
pub const NZ_EPSILON: f64 = 1e-4;

/// Mean-centred heights with a validity mask; invalid pixels hold zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub width: usize,
    pub height: usize,
    pub z: Vec<f64>,
    pub mask: Vec<bool>,
}

impl DepthMap {
    /// Shifts the valid heights to zero mean and zeroes the rest.
    pub fn centered(width: usize, height: usize, mut z: Vec<f64>, mask: Vec<bool>) -> Self {
        let (sum, n) = z
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        for (v, &m) in z.iter_mut().zip(&mask) {
            *v = if m { *v - mean } else { 0.0 };
        }
        DepthMap { width, height, z, mask }
    }

    pub fn at(&self, row: usize, col: usize) -> Option<f64> {
        let i = row * self.width + col;
        self.mask[i].then(|| self.z[i])
    }
}

/// Per-pixel slopes `p = ∂z/∂x` (along columns) and `q = ∂z/∂y` (along rows).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub mask: Vec<bool>,
    /// Number of pixels whose `nz` was raised to [`NZ_EPSILON`].
    pub clamped: usize,
}

impl GradientField {
    /// Gradient field of a uniformly scaled height field.
    pub fn scaled(&self, alpha: f64) -> GradientField {
        GradientField {
            p: self.p.iter().map(|v| v * alpha).collect(),
            q: self.q.iter().map(|v| v * alpha).collect(),
            ..self.clone()
        }
    }

    /// Right-hand side of the normal equations `L z = b`, with `L` the graph
    /// Laplacian of the valid 4-neighbour edges.
    pub(crate) fn divergence(&self) -> Vec<f64> {
        let (w, h) = (self.width, self.height);
        let mut b = alloc::vec![0.0; w * h];
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                if !self.mask[i] {
                    continue;
                }
                if c + 1 < w && self.mask[i + 1] {
                    let g = 0.5 * (self.p[i] + self.p[i + 1]);
                    b[i] -= g;
                    b[i + 1] += g;
                }
                if r + 1 < h && self.mask[i + w] {
                    let g = 0.5 * (self.q[i] + self.q[i + w]);
                    b[i] -= g;
                    b[i + w] += g;
                }
            }
        }
        b
    }
}

/// `p = -nx / max(nz, ε)`, `q = -ny / max(nz, ε)` on valid pixels, zero
/// elsewhere. Clamped pixels are counted, not rejected.
pub fn normals_to_gradients(n: &NormalMap) -> GradientField {
    let mut p = alloc::vec![0.0; n.len()];
    let mut q = alloc::vec![0.0; n.len()];
    let mut clamped = 0;
    for (i, (v, &m)) in n.data().iter().zip(n.mask()).enumerate() {
        if !m {
            continue;
        }
        let nz = if v.z < NZ_EPSILON {
            clamped += 1;
            NZ_EPSILON
        } else {
            v.z
        };
        p[i] = -v.x / nz;
        q[i] = -v.y / nz;
    }
    GradientField {
        width: n.width(),
        height: n.height(),
        p,
        q,
        mask: n.mask().to_vec(),
        clamped,
    }
}
