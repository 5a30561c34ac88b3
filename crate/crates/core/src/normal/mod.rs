//! Normal-map value types and the per-pixel rotation algebra.

pub(crate) mod map;
pub(crate) mod rotation;
mod vec;

pub use map::{build_rotation_field, normalize_map, NormalMap, RotationField, VectorField};
pub use rotation::{
    rotation_from_z, rotation_to_z, rotation_to_z_with_fallback, Rotation3, POLE_EPSILON,
};
pub use vec::{angle_between, UnitVec3, Vec3};
