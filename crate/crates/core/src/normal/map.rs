use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::rotation::{check_pole, rotation_to_z_raw, Rotation3};
use super::vec::{UnitVec3, Vec3};
use crate::error::{Error, Result};
use crate::math;
use crate::par;

/// Valid pixels must be unit length to this tolerance.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Vectors shorter than this cannot be normalized.
pub const DEGENERATE_LENGTH: f64 = 1e-8;

fn check_dims(width: usize, height: usize, len: usize, mask_len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidMap(format!(
            "dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    if len != width * height || mask_len != width * height {
        return Err(Error::InvalidMap(format!(
            "expected {} pixels, got {len} values and {mask_len} mask entries",
            width * height
        )));
    }
    Ok(())
}

/// Row-major grid of arbitrary (not necessarily unit) 3-vectors with a mask.
///
/// Intermediate form for filtered or interpolated normals before they are
/// renormalized with [`normalize_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    width: usize,
    height: usize,
    data: Vec<Vec3>,
    mask: Vec<bool>,
}

impl VectorField {
    pub fn new(width: usize, height: usize, data: Vec<Vec3>, mask: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len(), mask.len())?;
        Ok(VectorField {
            width,
            height,
            data,
            mask,
        })
    }

    /// Field where exactly-zero vectors are marked invalid.
    pub fn from_zero_masked(width: usize, height: usize, data: Vec<Vec3>) -> Result<Self> {
        let mask = data.iter().map(|v| !v.is_zero()).collect::<Vec<_>>();
        VectorField::new(width, height, data, mask)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Vec3] {
        &self.data
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Normalizes every valid pixel of `raw` to unit length.
///
/// Invalid pixels are stored as the zero vector. Valid pixels shorter than
/// [`DEGENERATE_LENGTH`] are reported together in [`Error::DegeneratePixel`].
pub fn normalize_map(raw: &VectorField) -> Result<NormalMap> {
    let mut data = vec![Vec3::ZERO; raw.data.len()];
    let mut bad = Vec::new();
    for (i, (v, &m)) in raw.data.iter().zip(&raw.mask).enumerate() {
        if !m {
            continue;
        }
        let n = v.norm();
        if !(n >= DEGENERATE_LENGTH) || !n.is_finite() {
            bad.push((i / raw.width, i % raw.width));
            continue;
        }
        data[i] = if n == 1.0 { *v } else { *v * (1.0 / n) };
    }
    if !bad.is_empty() {
        return Err(Error::DegeneratePixel { pixels: bad });
    }
    Ok(NormalMap {
        width: raw.width,
        height: raw.height,
        data,
        mask: raw.mask.clone(),
    })
}

/// H×W grid of unit normals with a validity mask.
///
/// Shape components, detail components and transfer results are all values
/// of this type. Invalid pixels always hold the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMap {
    width: usize,
    height: usize,
    data: Vec<Vec3>,
    mask: Vec<bool>,
}

impl NormalMap {
    /// Validates dimensions and that every valid pixel has unit length.
    pub fn new(width: usize, height: usize, mut data: Vec<Vec3>, mask: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len(), mask.len())?;
        for (i, (v, &m)) in data.iter_mut().zip(&mask).enumerate() {
            if !m {
                *v = Vec3::ZERO;
            } else if !(math::abs(v.norm() - 1.0) <= UNIT_TOLERANCE) {
                return Err(Error::InvalidMap(format!(
                    "pixel ({}, {}) has norm {}",
                    i / width,
                    i % width,
                    v.norm()
                )));
            }
        }
        Ok(NormalMap {
            width,
            height,
            data,
            mask,
        })
    }

    /// Builds a map from raw vectors: exact zeros become invalid pixels and
    /// everything else is normalized.
    pub fn from_vectors(width: usize, height: usize, data: Vec<Vec3>) -> Result<Self> {
        normalize_map(&VectorField::from_zero_masked(width, height, data)?)
    }

    /// Builds a map by evaluating `f(row, col)`; `None` marks an invalid
    /// pixel, `Some(v)` is normalized.
    pub fn from_fn<F>(width: usize, height: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Option<Vec3>,
    {
        let mut data = Vec::with_capacity(width * height);
        let mut mask = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                match f(r, c) {
                    Some(v) => {
                        data.push(v);
                        mask.push(true);
                    }
                    None => {
                        data.push(Vec3::ZERO);
                        mask.push(false);
                    }
                }
            }
        }
        normalize_map(&VectorField::new(width, height, data, mask)?)
    }

    /// Fully valid map with the same normal everywhere.
    pub fn constant(width: usize, height: usize, n: UnitVec3) -> Self {
        assert!(width > 0 && height > 0, "empty normal map");
        NormalMap {
            width,
            height,
            data: vec![n.get(); width * height],
            mask: vec![true; width * height],
        }
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<Vec3>, mask: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert_eq!(mask.len(), width * height);
        NormalMap {
            width,
            height,
            data,
            mask,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[Vec3] {
        &self.data
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Raw stored value; the zero vector for invalid pixels.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Vec3 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn is_valid(&self, row: usize, col: usize) -> bool {
        self.mask[row * self.width + col]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<Vec3> {
        let i = row * self.width + col;
        self.mask[i].then(|| self.data[i])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_fully_valid(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    pub fn same_dims(&self, other: &NormalMap) -> bool {
        self.dims() == other.dims()
    }

    pub(crate) fn require_same_dims(&self, other: &NormalMap) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            })
        }
    }

    pub(crate) fn require_same_grid(&self, other: &NormalMap) -> Result<()> {
        self.require_same_dims(other)?;
        if self.mask == other.mask {
            Ok(())
        } else {
            Err(Error::MaskMismatch)
        }
    }

    /// Same normals with the mask intersected with `mask`.
    pub fn restricted(&self, mask: &[bool]) -> Result<NormalMap> {
        if mask.len() != self.len() {
            return Err(Error::InvalidMap(format!(
                "mask has {} entries, map has {} pixels",
                mask.len(),
                self.len()
            )));
        }
        let mask: Vec<bool> = self.mask.iter().zip(mask).map(|(&a, &b)| a && b).collect();
        let data = self
            .data
            .iter()
            .zip(&mask)
            .map(|(&v, &m)| if m { v } else { Vec3::ZERO })
            .collect();
        Ok(NormalMap::from_parts(self.width, self.height, data, mask))
    }

    /// Unnormalized copy, for handing to filters and interpolators.
    pub fn to_field(&self) -> VectorField {
        VectorField {
            width: self.width,
            height: self.height,
            data: self.data.clone(),
            mask: self.mask.clone(),
        }
    }

    /// Applies `f(row, col, value)` to every valid pixel, row-parallel when
    /// enabled. Invalid pixels stay zero.
    pub(crate) fn map_valid<F>(&self, f: F) -> Result<NormalMap>
    where
        F: Fn(usize, usize, Vec3) -> Result<Vec3> + Sync + Send,
    {
        let w = self.width;
        let mut out = vec![Vec3::ZERO; self.len()];
        par::try_for_each_row(&mut out, w, |r, row| {
            for (c, o) in row.iter_mut().enumerate() {
                let i = r * w + c;
                if self.mask[i] {
                    *o = f(r, c, self.data[i])?;
                }
            }
            Ok(())
        })?;
        Ok(NormalMap::from_parts(self.width, self.height, out, self.mask.clone()))
    }
}

/// Per-pixel rotations taking each shape normal onto `+z`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationField {
    width: usize,
    height: usize,
    rotations: Vec<Rotation3>,
    mask: Vec<bool>,
}

impl RotationField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn rotations(&self) -> &[Rotation3] {
        &self.rotations
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> &Rotation3 {
        &self.rotations[row * self.width + col]
    }
}

/// Evaluates [`rotation_to_z`](super::rotation_to_z) at every valid pixel of
/// `shape`. Invalid pixels carry the identity.
pub fn build_rotation_field(shape: &NormalMap) -> Result<RotationField> {
    let w = shape.width;
    let mut rotations = vec![Rotation3::IDENTITY; shape.len()];
    par::try_for_each_row(&mut rotations, w, |r, row| {
        for (c, out) in row.iter_mut().enumerate() {
            let i = r * w + c;
            if shape.mask[i] {
                let n = shape.data[i];
                check_pole(n).map_err(|e| e.at_pixel(r, c))?;
                *out = rotation_to_z_raw(n);
            }
        }
        Ok(())
    })?;
    Ok(RotationField {
        width: shape.width,
        height: shape.height,
        rotations,
        mask: shape.mask.clone(),
    })
}
