use core::ops::Mul;

use super::vec::{UnitVec3, Vec3};
use crate::error::{Error, Result};
use crate::math;

/// Rotations whose source normal has `z <= -1 + POLE_EPSILON` are rejected.
pub const POLE_EPSILON: f64 = 1e-6;

/// Row-major 3×3 rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    pub m: [[f64; 3]; 3],
}

impl Default for Rotation3 {
    fn default() -> Self {
        Rotation3::IDENTITY
    }
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    #[inline]
    pub fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Rotation3 { m }
    }

    #[inline]
    pub fn transpose(&self) -> Rotation3 {
        let m = &self.m;
        Rotation3 {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    /// Inverse of a rotation, i.e. its transpose.
    #[inline]
    pub fn inverse(&self) -> Rotation3 {
        self.transpose()
    }

    #[inline]
    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    /// `selfᵀ · v` without forming the transpose.
    #[inline]
    pub fn apply_transpose(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z,
        )
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Rotation angle in radians, `acos((tr R − 1) / 2)` with the argument clamped.
    pub fn angle(&self) -> f64 {
        math::acos(((self.trace() - 1.0) * 0.5).clamp(-1.0, 1.0))
    }

    /// Largest entrywise deviation of `RᵀR` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        let rtr = self.transpose() * *self;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(math::abs(rtr.m[i][j] - id));
            }
        }
        worst
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;
    fn mul(self, o: Rotation3) -> Rotation3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Rotation3 { m }
    }
}

/// Closed-form Rodrigues rotation taking `n` onto `+z`, without the pole check.
#[inline]
pub(crate) fn rotation_to_z_raw(n: Vec3) -> Rotation3 {
    let k = 1.0 / (1.0 + n.z);
    let xy = -n.x * n.y * k;
    Rotation3 {
        m: [
            [1.0 - n.x * n.x * k, xy, -n.x],
            [xy, 1.0 - n.y * n.y * k, -n.y],
            [n.x, n.y, 1.0 - (n.x * n.x + n.y * n.y) * k],
        ],
    }
}

#[inline]
pub(crate) fn check_pole(n: Vec3) -> Result<()> {
    // Also rejects NaN.
    if n.z > -1.0 + POLE_EPSILON {
        Ok(())
    } else {
        Err(Error::PoleSingularity { pixel: None })
    }
}

/// Rotation `R` with `R · n = z`, where `z = (0, 0, 1)`.
///
/// Fails with [`Error::PoleSingularity`] when `n` points (almost) along `-z`;
/// [`rotation_to_z_with_fallback`] handles that case.
pub fn rotation_to_z(n: UnitVec3) -> Result<Rotation3> {
    let n = n.get();
    check_pole(n)?;
    Ok(rotation_to_z_raw(n))
}

/// Inverse of [`rotation_to_z`]: maps `z` onto `n`.
pub fn rotation_from_z(n: UnitVec3) -> Result<Rotation3> {
    rotation_to_z(n).map(|r| r.transpose())
}

/// Rodrigues rotation from unit `a` onto unit `b`; requires `a · b > -1`.
fn rotation_between(a: Vec3, b: Vec3) -> Rotation3 {
    let v = a.cross(b);
    let k = 1.0 / (1.0 + a.dot(b));
    // R = I + [v]x + [v]x^2 / (1 + a.b)
    let skew = [[0.0, -v.z, v.y], [v.z, 0.0, -v.x], [-v.y, v.x, 0.0]];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let sq: f64 = (0..3).map(|l| skew[i][l] * skew[l][j]).sum();
            m[i][j] = if i == j { 1.0 } else { 0.0 } + skew[i][j] + sq * k;
        }
    }
    Rotation3 { m }
}

/// Like [`rotation_to_z`], but near the `-z` pole composes two rotations:
/// `n` onto `+x`, then `+x` onto `+z`.
pub fn rotation_to_z_with_fallback(n: UnitVec3) -> Rotation3 {
    match rotation_to_z(n) {
        Ok(r) => r,
        Err(_) => {
            let to_x = rotation_between(n.get(), Vec3::X);
            rotation_to_z_raw(Vec3::X) * to_x
        }
    }
}
