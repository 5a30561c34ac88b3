//! Integer-factor resampling of normal maps.
//!
//! Output pixel centres map to source coordinates `(dst + 0.5) / f - 0.5`.
//! Masks are scaled by nearest neighbour, which for integer factors is plain
//! pixel replication.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::normal::{NormalMap, Vec3};
use crate::par;

/// Keys cubic convolution kernel with `a = -0.5`.
fn keys(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = math::abs(x);
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Four source indices (clamped to the edge) and weights for one output
/// coordinate.
fn taps(dst: usize, factor: usize, len: usize) -> ([usize; 4], [f64; 4]) {
    let s = (dst as f64 + 0.5) / factor as f64 - 0.5;
    let base = math::floor(s);
    let t = s - base;
    let base = base as isize;
    let mut idx = [0usize; 4];
    let mut wts = [0.0; 4];
    for k in 0..4 {
        let i = base - 1 + k as isize;
        idx[k] = i.clamp(0, len as isize - 1) as usize;
        wts[k] = keys(t - (k as f64 - 1.0));
    }
    (idx, wts)
}

fn check_factor(factor: usize) -> Result<()> {
    if factor == 0 {
        return Err(Error::InvalidParameter("resampling factor must be positive".into()));
    }
    Ok(())
}

/// Nearest-neighbour scaled mask.
pub fn upsample_mask(mask: &[bool], width: usize, height: usize, factor: usize) -> Vec<bool> {
    let ow = width * factor;
    (0..height * factor)
        .flat_map(|r| (0..ow).map(move |c| mask[(r / factor) * width + c / factor]))
        .collect()
}

/// Nearest-neighbour upsampling: each source pixel becomes an
/// `factor`×`factor` block.
pub fn upsample_nearest(n: &NormalMap, factor: usize) -> Result<NormalMap> {
    check_factor(factor)?;
    let (w, h) = n.dims();
    let ow = w * factor;
    let data = (0..h * factor)
        .flat_map(|r| (0..ow).map(move |c| n.at(r / factor, c / factor)))
        .collect();
    Ok(NormalMap::from_parts(ow, h * factor, data, upsample_mask(n.mask(), w, h, factor)))
}

/// Channel-wise bicubic upsampling followed by per-pixel renormalization.
///
/// Taps on invalid source pixels take the value of the output pixel's
/// nearest source pixel, so the background never bleeds into the surface.
/// If the interpolated vector degenerates, the nearest source value is used.
pub fn upsample_bicubic(n: &NormalMap, factor: usize) -> Result<NormalMap> {
    check_factor(factor)?;
    let (w, h) = n.dims();
    let (ow, oh) = (w * factor, h * factor);
    let mask = upsample_mask(n.mask(), w, h, factor);
    let col_taps: Vec<([usize; 4], [f64; 4])> = (0..ow).map(|c| taps(c, factor, w)).collect();
    let mut data = vec![Vec3::ZERO; ow * oh];
    par::for_each_row(&mut data, ow, |r, row| {
        let (ri, rw) = taps(r, factor, h);
        for (c, out) in row.iter_mut().enumerate() {
            if !mask[r * ow + c] {
                continue;
            }
            let nearest = n.at(r / factor, c / factor);
            let (ci, cw) = &col_taps[c];
            let mut acc = Vec3::ZERO;
            for a in 0..4 {
                let mut line = Vec3::ZERO;
                for b in 0..4 {
                    let v = n.get(ri[a], ci[b]).unwrap_or(nearest);
                    line += v * cw[b];
                }
                acc += line * rw[a];
            }
            *out = acc.normalized().unwrap_or(nearest);
        }
    });
    Ok(NormalMap::from_parts(ow, oh, data, mask))
}

/// Box downsampling by an integer factor: each output pixel is the
/// renormalized mean of the valid pixels of its block, invalid when the
/// block has none. Trailing rows and columns that do not fill a block are
/// dropped.
pub fn downsample_box(n: &NormalMap, factor: usize) -> Result<NormalMap> {
    check_factor(factor)?;
    let (ow, oh) = (n.width() / factor, n.height() / factor);
    if ow == 0 || oh == 0 {
        return Err(Error::InvalidParameter("map is smaller than one block".into()));
    }
    let mut data = vec![Vec3::ZERO; ow * oh];
    let mut mask = vec![false; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            let mut acc = Vec3::ZERO;
            for rr in r * factor..(r + 1) * factor {
                for cc in c * factor..(c + 1) * factor {
                    if let Some(v) = n.get(rr, cc) {
                        acc += v;
                    }
                }
            }
            if let Some(u) = acc.normalized() {
                data[r * ow + c] = u;
                mask[r * ow + c] = true;
            }
        }
    }
    Ok(NormalMap::from_parts(ow, oh, data, mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::mae;
    use crate::normal::UnitVec3;
    use crate::synthetic;

    #[test]
    fn keys_kernel_interpolates_and_sums_to_one() {
        assert_eq!(keys(0.0), 1.0);
        assert_eq!(keys(1.0), 0.0);
        assert_eq!(keys(2.0), 0.0);
        for t in [0.0, 0.125, 0.3, 0.5, 0.9] {
            let s = keys(t + 1.0) + keys(t) + keys(1.0 - t) + keys(2.0 - t);
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_reproduces_linear_ramps() {
        // Keys' kernel is exact for polynomials up to degree two; check a
        // ramp on interior samples through the tap helper.
        let f = |x: f64| 3.0 * x - 1.0;
        for dst in 8..24 {
            let (idx, w) = taps(dst, 4, 10);
            let v: f64 = (0..4).map(|k| w[k] * f(idx[k] as f64)).sum();
            let s = (dst as f64 + 0.5) / 4.0 - 0.5;
            assert!((v - f(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_map_stays_constant() {
        let m = NormalMap::constant(7, 5, UnitVec3::Z);
        for f in [2, 3, 4, 8] {
            let up = upsample_bicubic(&m, f).unwrap();
            assert_eq!(up.dims(), (7 * f, 5 * f));
            assert!(up.data().iter().all(|&v| (v - Vec3::Z).norm() < 1e-15));
        }
    }

    #[test]
    fn nearest_makes_constant_blocks() {
        let m = synthetic::bumps(6, 6, 1.0, 5.0);
        let up = upsample_nearest(&m, 2).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let v = m.at(r, c);
                for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    assert_eq!(up.at(2 * r + dr, 2 * c + dc), v);
                }
            }
        }
    }

    #[test]
    fn mask_is_replicated() {
        let m = synthetic::sphere_cap(20, 20, 7.0);
        let up = upsample_bicubic(&m, 3).unwrap();
        for r in 0..60 {
            for c in 0..60 {
                assert_eq!(up.is_valid(r, c), m.is_valid(r / 3, c / 3));
            }
        }
        for v in up.data().iter().zip(up.mask()).filter(|(_, &m)| m).map(|(v, _)| v) {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_hemisphere_survives_a_round_trip() {
        let m = synthetic::full_frame_sphere(128, 128);
        let low = downsample_box(&m, 2).unwrap();
        let up = upsample_bicubic(&low, 2).unwrap();
        assert!(mae(&up, &m).unwrap() <= 2.0);
    }
}
