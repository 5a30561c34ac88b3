//! Shape and detail components of a normal map.
//!
//! The shape component is the normalized convolution of the normals with a
//! low-pass kernel, renormalized to unit length per pixel. The detail
//! component re-expresses each normal in the frame whose z-axis is the shape
//! normal at that pixel: `Δ(r,c) = R(n̄(r,c) → z) · n(r,c)`. Recomposition
//! applies the inverse rotation.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filter::{self, masked_sums};
use crate::normal::rotation::{check_pole, rotation_to_z_raw};
use crate::normal::{NormalMap, Vec3};

/// Default kernel half-width.
pub const DEFAULT_HALF_WIDTH: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Gaussian { sigma: f64 },
    Average,
}

/// Separable `(2w+1)×(2w+1)` low-pass kernel with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    half_width: usize,
    kind: KernelKind,
    taps: Vec<f64>,
}

impl Kernel {
    /// Gaussian kernel with an explicit standard deviation.
    pub fn gaussian(half_width: usize, sigma: f64) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidParameter("kernel half-width must be at least 1".into()));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("gaussian sigma must be positive, got {sigma}")));
        }
        Ok(Kernel {
            half_width,
            kind: KernelKind::Gaussian { sigma },
            taps: filter::gaussian_taps(half_width, sigma),
        })
    }

    /// Gaussian kernel with `σ = w / 2`.
    pub fn gaussian_default(half_width: usize) -> Result<Self> {
        Kernel::gaussian(half_width, half_width as f64 / 2.0)
    }

    /// Box kernel.
    pub fn average(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidParameter("kernel half-width must be at least 1".into()));
        }
        let n = 2 * half_width + 1;
        Ok(Kernel {
            half_width,
            kind: KernelKind::Average,
            taps: alloc::vec![1.0 / n as f64; n],
        })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sigma(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Gaussian { sigma } => Some(sigma),
            KernelKind::Average => None,
        }
    }

    /// 1-D factor of the kernel, length `2w+1`.
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Weight at offset `(s, t)` with `-w ≤ s, t ≤ w`.
    pub fn weight(&self, s: isize, t: isize) -> f64 {
        let w = self.half_width as isize;
        self.taps[(s + w) as usize] * self.taps[(t + w) as usize]
    }

    /// Full 2-D weights, row-major.
    pub fn weights(&self) -> Vec<f64> {
        self.taps
            .iter()
            .flat_map(|a| self.taps.iter().map(move |b| a * b))
            .collect()
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::gaussian_default(DEFAULT_HALF_WIDTH).expect("default kernel is valid")
    }
}

/// A normal map split into its shape and detail components.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub shape: NormalMap,
    pub detail: NormalMap,
    pub kernel: Kernel,
}

/// Low-pass filtered normals, renormalized per pixel.
///
/// Weights are renormalized over the in-bounds valid part of each footprint,
/// so background pixels never tilt boundary normals.
pub fn shape_component(n: &NormalMap, k: &Kernel) -> Result<NormalMap> {
    let (w, h) = n.dims();
    let values: Vec<[f64; 3]> = n.data().iter().map(|v| v.to_array()).collect();
    let sums = masked_sums(w, h, &values, n.mask(), k.taps());
    let mut data = alloc::vec![Vec3::ZERO; n.len()];
    let mut degenerate = Vec::new();
    for (i, out) in data.iter_mut().enumerate() {
        if !n.mask()[i] {
            continue;
        }
        let weight = sums.weight(i);
        if !(weight > 0.0) {
            return Err(Error::EmptyNeighborhood { row: i / w, col: i % w });
        }
        let v = Vec3::from_array(*sums.sum(i));
        match (v * (1.0 / weight)).normalized() {
            Some(u) if v.norm() / weight >= crate::normal::map::DEGENERATE_LENGTH => *out = u,
            _ => degenerate.push((i / w, i % w)),
        }
    }
    if !degenerate.is_empty() {
        return Err(Error::DegeneratePixel { pixels: degenerate });
    }
    Ok(NormalMap::from_parts(w, h, data, n.mask().to_vec()))
}

/// Each normal of `n` rotated into the frame of the matching `shape` normal.
pub fn detail_component(n: &NormalMap, shape: &NormalMap) -> Result<NormalMap> {
    n.require_same_grid(shape)?;
    n.map_valid(|r, c, v| {
        let s = shape.at(r, c);
        check_pole(s).map_err(|e| e.at_pixel(r, c))?;
        Ok(rotation_to_z_raw(s).apply(v))
    })
}

pub fn decompose(n: &NormalMap, k: &Kernel) -> Result<Decomposition> {
    let shape = shape_component(n, k)?;
    let detail = detail_component(n, &shape)?;
    Ok(Decomposition {
        shape,
        detail,
        kernel: k.clone(),
    })
}

/// Rotates `detail` back from the frames of `shape`: `n = R(n̄ → z)ᵀ · Δ`.
pub fn recompose_parts(shape: &NormalMap, detail: &NormalMap) -> Result<NormalMap> {
    shape.require_same_grid(detail)?;
    shape.map_valid(|r, c, s| {
        check_pole(s).map_err(|e| e.at_pixel(r, c))?;
        Ok(rotation_to_z_raw(s).apply_transpose(detail.at(r, c)))
    })
}

pub fn recompose(d: &Decomposition) -> Result<NormalMap> {
    recompose_parts(&d.shape, &d.detail)
}

/// Detail component extracted `order` times in a row with the same kernel:
/// order 1 is the ordinary detail component, order `j` the detail component
/// of order `j - 1`.
pub fn detail_order_k(n: &NormalMap, k: &Kernel, order: usize) -> Result<NormalMap> {
    if order == 0 {
        return Err(Error::InvalidParameter("detail order must be at least 1".into()));
    }
    let mut current = decompose(n, k)?.detail;
    for _ in 1..order {
        current = decompose(&current, k)?.detail;
    }
    Ok(current)
}
