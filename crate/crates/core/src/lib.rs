//! Shape/detail decomposition of surface normal maps.
//!
//! A normal map is split into a *shape component*, the renormalized low-pass
//! filtered normals, and a *detail component*, each normal expressed in the
//! local frame whose z-axis is the shape normal at that pixel. Because the
//! detail component carries no shape of its own it can be re-applied to any
//! other smooth shape, synthesized into larger swatches, or upsampled
//! independently of the underlying geometry.
//!
//! The crate is `no_std` (with `alloc`). The `std` feature adds the spectral
//! depth integrator, `parallel` adds row-parallel evaluation of the per-pixel
//! kernels through rayon.
//!
//! Pipelines:
//!
//! * [`decompose`] – shape and detail components, recomposition, repeated extraction.
//! * [`transfer`] – global and local detail transfer with similarity checks.
//! * [`synthesis`] – exemplar-based growth of a detail swatch.
//! * [`superres`] – component-wise upsampling with a pluggable detail enhancer.
//! * [`integrate`] – normals to depth, and depth to a triangle mesh.
//! * [`metrics`] – angular error, channel-wise SSIM, rotation-field similarity.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
mod math;
mod par;

pub mod decompose;
pub mod filter;
pub mod integrate;
pub mod metrics;
pub mod normal;
pub mod resample;
pub mod superres;
pub mod synthesis;
pub mod synthetic;
pub mod transfer;

pub use error::{Error, Result};
pub use normal::{
    build_rotation_field, normalize_map, rotation_from_z, rotation_to_z, NormalMap, Rotation3,
    RotationField, UnitVec3, Vec3, VectorField,
};
