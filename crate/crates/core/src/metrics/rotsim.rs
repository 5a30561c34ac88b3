use alloc::vec;
use alloc::vec::Vec;

use super::ScalarField;
use crate::error::Result;
use crate::math;
use crate::normal::{build_rotation_field, NormalMap, Rotation3};
use crate::par;

/// Global means of the rotation-field similarity statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotSimilarityReport {
    pub theta_bar_deg: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Per-pixel fields and their means.
#[derive(Debug, Clone, PartialEq)]
pub struct RotSimilarity {
    pub theta_bar_deg: ScalarField,
    pub l1: ScalarField,
    pub l2: ScalarField,
    pub linf: ScalarField,
    pub mean: RotSimilarityReport,
}

/// Spectral norm (largest singular value) of a 3×3 matrix.
pub fn spectral_norm(m: &[[f64; 3]; 3]) -> f64 {
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (0..3).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    math::sqrt(sym3_max_eigenvalue(&g).max(0.0))
}

/// Largest eigenvalue of a symmetric 3×3 matrix (trigonometric closed form).
fn sym3_max_eigenvalue(a: &[[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if p1 == 0.0 {
        return a[0][0].max(a[1][1]).max(a[2][2]);
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let (d0, d1, d2) = (a[0][0] - q, a[1][1] - q, a[2][2] - q);
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    let p = math::sqrt(p2 / 6.0);
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= q;
        for v in row.iter_mut() {
            *v /= p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = math::acos((det / 2.0).clamp(-1.0, 1.0)) / 3.0;
    q + 2.0 * p * math::cos(phi)
}

/// `(θ, ℓ₁, ℓ₂, ℓ∞)` of the relative rotation `a · bᵀ`.
fn pair_stats(a: &Rotation3, b: &Rotation3) -> [f64; 4] {
    if a == b {
        return [0.0; 4];
    }
    let q = *a * b.transpose();
    // Rotation angle from the symmetric and skew parts; exact at zero.
    let axis = [
        q.m[2][1] - q.m[1][2],
        q.m[0][2] - q.m[2][0],
        q.m[1][0] - q.m[0][1],
    ];
    let sin2 = math::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    let theta = math::atan2(sin2, q.trace() - 1.0);
    let mut d = q.m;
    for (i, row) in d.iter_mut().enumerate() {
        row[i] -= 1.0;
    }
    let l1 = (0..3)
        .map(|j| (0..3).map(|i| math::abs(d[i][j])).sum::<f64>())
        .fold(0.0, f64::max);
    let linf = (0..3)
        .map(|i| (0..3).map(|j| math::abs(d[i][j])).sum::<f64>())
        .fold(0.0, f64::max);
    [theta, l1, spectral_norm(&d), linf]
}

/// Window averages of the rotation angle and of `‖R(r,c)·R(r+s,c+t)⁻¹ − I‖_p`
/// for `p ∈ {1, 2, ∞}` (induced matrix norms), where `R` rotates each shape
/// normal onto `+z`. Only valid in-bounds neighbours enter the average.
pub fn rotation_similarity(shape: &NormalMap, w: usize) -> Result<RotSimilarity> {
    let field = build_rotation_field(shape)?;
    let (width, height) = shape.dims();
    let hw = w as isize;
    let mut stats = vec![[0.0f64; 4]; shape.len()];
    par::for_each_row(&mut stats, width, |r, row| {
        for (c, out) in row.iter_mut().enumerate() {
            if !shape.is_valid(r, c) {
                continue;
            }
            let center = field.at(r, c);
            let mut acc = [0.0; 4];
            let mut n = 0usize;
            for s in -hw..=hw {
                let rr = r as isize + s;
                if rr < 0 || rr >= height as isize {
                    continue;
                }
                for t in -hw..=hw {
                    let cc = c as isize + t;
                    if cc < 0 || cc >= width as isize {
                        continue;
                    }
                    let (rr, cc) = (rr as usize, cc as usize);
                    if !shape.is_valid(rr, cc) {
                        continue;
                    }
                    let p = pair_stats(center, field.at(rr, cc));
                    for k in 0..4 {
                        acc[k] += p[k];
                    }
                    n += 1;
                }
            }
            for k in 0..4 {
                out[k] = acc[k] / n as f64;
            }
            out[0] = math::to_degrees(out[0]);
        }
    });
    let mask = shape.mask().to_vec();
    let split = |k: usize| ScalarField {
        width,
        height,
        values: stats.iter().map(|s| s[k]).collect::<Vec<_>>(),
        mask: mask.clone(),
    };
    let (theta, l1, l2, linf) = (split(0), split(1), split(2), split(3));
    let mean = RotSimilarityReport {
        theta_bar_deg: theta.mean().unwrap_or(0.0),
        l1: l1.mean().unwrap_or(0.0),
        l2: l2.mean().unwrap_or(0.0),
        linf: linf.mean().unwrap_or(0.0),
    };
    Ok(RotSimilarity {
        theta_bar_deg: theta,
        l1,
        l2,
        linf,
        mean,
    })
}
