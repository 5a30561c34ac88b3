//! Quantitative comparisons between normal maps.
//!
//! * [`mae`] – mean angular error in degrees over the common mask.
//! * [`ssim`] – mean of the per-channel structural similarity.
//! * [`rotation_similarity`] – how much the per-pixel rotations of a shape
//!   component vary within a window.
//! * [`local_variance_field`] – spread of the normals within a window.

mod rotsim;
mod ssim;

use core::fmt;

use alloc::vec::Vec;

pub use rotsim::{rotation_similarity, spectral_norm, RotSimilarity, RotSimilarityReport};
pub use ssim::{ssim, SsimScore, SSIM_C1, SSIM_C2, SSIM_HALF_WINDOW, SSIM_SIGMA};

use crate::error::{Error, Result};
use crate::filter::masked_sums;
use crate::math;
use crate::normal::{angle_between, NormalMap};

/// Mask of pixels valid in both maps.
pub(crate) fn overlap(a: &NormalMap, b: &NormalMap) -> Result<Vec<bool>> {
    a.require_same_dims(b)?;
    let m: Vec<bool> = a.mask().iter().zip(b.mask()).map(|(&x, &y)| x && y).collect();
    if m.iter().any(|&v| v) {
        Ok(m)
    } else {
        Err(Error::EmptyOverlap)
    }
}

/// Mean angular error in degrees between `a` and `b` over their common
/// valid pixels. Ranges over `[0, 180]`.
pub fn mae(a: &NormalMap, b: &NormalMap) -> Result<f64> {
    let omega = overlap(a, b)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((x, y), &m) in a.data().iter().zip(b.data()).zip(&omega) {
        if m {
            sum += math::to_degrees(angle_between(*x, *y));
            count += 1;
        }
    }
    Ok(sum / count as f64)
}

/// Per-pixel angular error in degrees; `None` outside the common mask.
pub fn angular_error_map(a: &NormalMap, b: &NormalMap) -> Result<Vec<Option<f64>>> {
    let omega = overlap(a, b)?;
    Ok(a
        .data()
        .iter()
        .zip(b.data())
        .zip(&omega)
        .map(|((x, y), &m)| m.then(|| math::to_degrees(angle_between(*x, *y))))
        .collect())
}

/// Angular error and SSIM of one comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub mae_deg: f64,
    pub ssim: f64,
    pub per_channel_ssim: [f64; 3],
    /// Size of the compared region.
    pub n_pixels: usize,
}

/// Both [`mae`] and [`ssim`] of `a` against `b`.
pub fn compare(a: &NormalMap, b: &NormalMap) -> Result<MetricReport> {
    let mae_deg = mae(a, b)?;
    let s = ssim(a, b)?;
    Ok(MetricReport {
        mae_deg,
        ssim: s.value,
        per_channel_ssim: s.per_channel,
        n_pixels: s.n_pixels,
    })
}

impl fmt::Display for MetricReport {
    /// `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mae_deg={:.6}", self.mae_deg)?;
        writeln!(f, "ssim={:.6}", self.ssim)?;
        writeln!(f, "ssim_x={:.6}", self.per_channel_ssim[0])?;
        writeln!(f, "ssim_y={:.6}", self.per_channel_ssim[1])?;
        writeln!(f, "ssim_z={:.6}", self.per_channel_ssim[2])?;
        writeln!(f, "n_pixels={}", self.n_pixels)
    }
}

/// Row-major scalar values with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ScalarField {
    pub fn at(&self, row: usize, col: usize) -> Option<f64> {
        let i = row * self.width + col;
        self.mask[i].then(|| self.values[i])
    }

    /// Mean over valid pixels, or `None` if there are none.
    pub fn mean(&self) -> Option<f64> {
        let (s, n) = self
            .values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
        (n > 0).then(|| s / n as f64)
    }
}

/// Trace of the covariance of the valid normals in the `(2w+1)²` window
/// around each pixel.
pub fn local_variance_field(n: &NormalMap, w: usize) -> ScalarField {
    let (width, height) = n.dims();
    let values: Vec<[f64; 4]> = n
        .data()
        .iter()
        .map(|v| [v.x, v.y, v.z, v.norm_squared()])
        .collect();
    let taps = alloc::vec![1.0; 2 * w + 1];
    let sums = masked_sums(width, height, &values, n.mask(), &taps);
    let out = (0..n.len())
        .map(|i| {
            let (s, wt) = (sums.sum(i), sums.weight(i));
            if !n.mask()[i] || wt <= 0.0 {
                return 0.0;
            }
            let mean = [s[0] / wt, s[1] / wt, s[2] / wt];
            let var = s[3] / wt - (mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2]);
            var.max(0.0)
        })
        .collect();
    ScalarField {
        width,
        height,
        values: out,
        mask: n.mask().to_vec(),
    }
}
