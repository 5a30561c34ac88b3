//! Procedural height fields rendered to normal maps.
//!
//! Pixel `(row, col)` sits at `x = col`, `y = row` in pixel units, so the
//! normal of a height field `z(x, y)` is `normalize(-∂z/∂x, -∂z/∂y, 1)`.
//! All derivatives are analytic.

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{self, PI};
use crate::normal::{NormalMap, Vec3};

/// A single plane wave `amplitude · cos(kx·x + ky·y + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave {
    pub amplitude: f64,
    pub kx: f64,
    pub ky: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    /// `z = a·x + b·y`.
    Plane { a: f64, b: f64 },
    /// Upper half of a sphere centred on the image centre. Pixels outside
    /// the silhouette are invalid.
    Sphere { radius: f64 },
    /// `z = A · sin(2πx/P) · sin(2πy/P)`.
    EggCrate { amplitude: f64, period: f64 },
    /// Sum of plane waves.
    Waves(Vec<Wave>),
    /// Ridge `z = -slope · |x - x0|`, a crease with a normal discontinuity.
    Roof { slope: f64, crease_x: f64 },
    /// `z = a·x² + b·y² + c·x·y` about the image centre.
    Quadric { a: f64, b: f64, c: f64 },
    Sum(Box<Surface>, Box<Surface>),
}

impl Surface {
    pub fn plus(self, other: Surface) -> Surface {
        Surface::Sum(Box::new(self), Box::new(other))
    }

    /// Height at pixel `(row, col)` of a `width`×`height` image, or `None`
    /// outside the surface.
    pub fn height_at(&self, width: usize, height: usize, row: usize, col: usize) -> Option<f64> {
        self.eval(width, height, row as f64, col as f64).map(|(z, _, _)| z)
    }

    /// Returns `(z, ∂z/∂x, ∂z/∂y)`.
    fn eval(&self, width: usize, height: usize, y: f64, x: f64) -> Option<(f64, f64, f64)> {
        let cx = (width as f64 - 1.0) * 0.5;
        let cy = (height as f64 - 1.0) * 0.5;
        match self {
            Surface::Plane { a, b } => Some((a * x + b * y, *a, *b)),
            Surface::Sphere { radius } => {
                let (u, v) = (x - cx, y - cy);
                let s = radius * radius - u * u - v * v;
                if s <= 0.0 {
                    return None;
                }
                let z = math::sqrt(s);
                Some((z, -u / z, -v / z))
            }
            Surface::EggCrate { amplitude, period } => {
                let k = 2.0 * PI / period;
                let (sx, cxk) = (libm::sin(k * x), libm::cos(k * x));
                let (sy, cyk) = (libm::sin(k * y), libm::cos(k * y));
                Some((
                    amplitude * sx * sy,
                    amplitude * k * cxk * sy,
                    amplitude * k * sx * cyk,
                ))
            }
            Surface::Waves(waves) => {
                let mut out = (0.0, 0.0, 0.0);
                for w in waves {
                    let arg = w.kx * x + w.ky * y + w.phase;
                    let s = libm::sin(arg);
                    out.0 += w.amplitude * libm::cos(arg);
                    out.1 -= w.amplitude * w.kx * s;
                    out.2 -= w.amplitude * w.ky * s;
                }
                Some(out)
            }
            Surface::Roof { slope, crease_x } => {
                let d = x - crease_x;
                let sign = if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                Some((-slope * math::abs(d), -slope * sign, 0.0))
            }
            Surface::Quadric { a, b, c } => {
                let (u, v) = (x - cx, y - cy);
                Some((
                    a * u * u + b * v * v + c * u * v,
                    2.0 * a * u + c * v,
                    2.0 * b * v + c * u,
                ))
            }
            Surface::Sum(p, q) => {
                let (z1, x1, y1) = p.eval(width, height, y, x)?;
                let (z2, x2, y2) = q.eval(width, height, y, x)?;
                Some((z1 + z2, x1 + x2, y1 + y2))
            }
        }
    }

    /// Analytic normal map of this surface.
    pub fn render(&self, width: usize, height: usize) -> NormalMap {
        NormalMap::from_fn(width, height, |r, c| {
            self.eval(width, height, r as f64, c as f64)
                .map(|(_, zx, zy)| Vec3::new(-zx, -zy, 1.0))
        })
        .expect("analytic normals are never degenerate")
    }

    /// Analytic heights, row-major, `None` outside the surface.
    pub fn heights(&self, width: usize, height: usize) -> Vec<Option<f64>> {
        (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| self.height_at(width, height, r, c))
            .collect()
    }
}

/// `n` random waves with wavelengths of at least `min_wavelength` pixels and
/// slopes bounded by `max_slope` in total.
pub fn random_waves(seed: u64, n: usize, min_wavelength: f64, max_slope: f64) -> Surface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = 2.0 * PI / min_wavelength;
    let waves = (0..n)
        .map(|_| {
            let k = rng.random_range(0.2 * kmax..kmax);
            let theta = rng.random_range(0.0..2.0 * PI);
            Wave {
                amplitude: max_slope / (n as f64 * k),
                kx: k * libm::cos(theta),
                ky: k * libm::sin(theta),
                phase: rng.random_range(0.0..2.0 * PI),
            }
        })
        .collect();
    Surface::Waves(waves)
}

pub fn plane(width: usize, height: usize) -> NormalMap {
    Surface::Plane { a: 0.0, b: 0.0 }.render(width, height)
}

/// Sphere cap of `radius` pixels centred in the frame, background outside.
pub fn sphere_cap(width: usize, height: usize, radius: f64) -> NormalMap {
    Surface::Sphere { radius }.render(width, height)
}

/// Fully valid sphere cap whose radius equals the larger image side, so the
/// whole frame is covered with slopes of at most 45°.
pub fn full_frame_sphere(width: usize, height: usize) -> NormalMap {
    Surface::Sphere {
        radius: width.max(height) as f64,
    }
    .render(width, height)
}

/// Egg-crate bumps on a flat plane.
pub fn bumps(width: usize, height: usize, amplitude: f64, period: f64) -> NormalMap {
    Surface::EggCrate { amplitude, period }.render(width, height)
}

/// Egg-crate bumps on a full-frame sphere cap.
pub fn bumpy_sphere(width: usize, height: usize, amplitude: f64, period: f64) -> NormalMap {
    Surface::Sphere {
        radius: width.max(height) as f64,
    }
    .plus(Surface::EggCrate { amplitude, period })
    .render(width, height)
}
