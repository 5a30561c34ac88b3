//! Component-wise upsampling.
//!
//! The map is decomposed, the shape component is upsampled bicubically, the
//! detail component by a [`DetailEnhancer`], and the upsampled detail is
//! transferred onto the upsampled shape.

use alloc::format;
use alloc::vec::Vec;

use crate::decompose::{decompose, Kernel};
use crate::error::{Error, Result};
use crate::normal::rotation::{check_pole, rotation_to_z_raw};
use crate::normal::{NormalMap, Vec3};
use crate::resample::{upsample_bicubic, upsample_mask};

/// Factors accepted by [`UpsampleSpec`].
pub const FACTORS: [usize; 4] = [2, 3, 4, 8];

/// Upsamples a detail component by an integer factor.
pub trait DetailEnhancer {
    /// Must return a map of `factor` times the input dimensions. Values are
    /// renormalized afterwards, so unit length is not required.
    fn enhance(&self, detail: &NormalMap, factor: usize) -> Result<NormalMap>;
}

/// Channel-wise bicubic interpolation of the detail component.
#[derive(Debug, Clone, Copy, Default)]
pub struct BicubicEnhancer;

impl DetailEnhancer for BicubicEnhancer {
    fn enhance(&self, detail: &NormalMap, factor: usize) -> Result<NormalMap> {
        upsample_bicubic(detail, factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpsampleSpec {
    factor: usize,
}

impl UpsampleSpec {
    pub fn new(factor: usize) -> Result<Self> {
        if !FACTORS.contains(&factor) {
            return Err(Error::InvalidParameter(format!(
                "upsampling factor must be one of 2, 3, 4, 8; got {factor}"
            )));
        }
        Ok(UpsampleSpec { factor })
    }

    pub fn factor(&self) -> usize {
        self.factor
    }
}

/// Decomposes `n` with `k`, upsamples the shape bicubically and the detail
/// with `enhancer`, and recombines them. The output mask is the
/// nearest-neighbour scaled input mask.
pub fn upsample(
    n: &NormalMap,
    spec: &UpsampleSpec,
    k: &Kernel,
    enhancer: &dyn DetailEnhancer,
) -> Result<NormalMap> {
    let f = spec.factor;
    let parts = decompose(n, k)?;
    let shape = upsample_bicubic(&parts.shape, f)?;
    let detail = enhancer.enhance(&parts.detail, f)?;
    let expected = (n.width() * f, n.height() * f);
    if detail.dims() != expected {
        return Err(Error::EnhancerFailed(format!(
            "expected {}x{} detail, got {}x{}",
            expected.0,
            expected.1,
            detail.width(),
            detail.height()
        )));
    }
    let mask = upsample_mask(n.mask(), n.width(), n.height(), f);
    debug_assert_eq!(mask, shape.mask());
    let w = shape.width();
    // Pixels the enhancer left empty carry flat detail.
    let details: Vec<Vec3> = (0..shape.len())
        .map(|i| {
            detail
                .get(i / w, i % w)
                .and_then(Vec3::normalized)
                .unwrap_or(Vec3::Z)
        })
        .collect();
    shape.map_valid(|r, c, s| {
        check_pole(s).map_err(|e| e.at_pixel(r, c))?;
        Ok(rotation_to_z_raw(s).apply_transpose(details[r * w + c]))
    })
}

/// Whole-map bicubic upsampling without decomposition, the baseline the
/// component-wise pipeline is measured against.
pub fn upsample_whole(n: &NormalMap, spec: &UpsampleSpec) -> Result<NormalMap> {
    upsample_bicubic(n, spec.factor)
}
