//! Separable normalized convolution over a validity mask.
//!
//! For a separable kernel `κ(s, t) = k(s)·k(t)` the masked sums
//! `Σ κ(s,t)·m(r+s,c+t)·v(r+s,c+t)` and `Σ κ(s,t)·m(r+s,c+t)` are computed in
//! two 1-D passes. Taps falling outside the image are skipped, which makes the
//! ratio of the two sums the convolution with weights renormalized over the
//! in-bounds valid footprint.

use alloc::vec;
use alloc::vec::Vec;

use crate::par;

/// Result of [`masked_sums`]: weighted sums and the total weight per pixel.
pub struct MaskedSums<const N: usize> {
    cells: Vec<([f64; N], f64)>,
}

impl<const N: usize> MaskedSums<N> {
    #[inline]
    pub fn sum(&self, i: usize) -> &[f64; N] {
        &self.cells[i].0
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.cells[i].1
    }
}

/// Masked separable sums of `values` (row-major, `width`×`height`) under the
/// 1-D kernel `taps` of odd length `2w+1`, applied along rows then columns.
///
/// Values at invalid pixels are ignored. Sums are accumulated in a fixed
/// order, so results are deterministic with or without parallelism.
pub fn masked_sums<const N: usize>(
    width: usize,
    height: usize,
    values: &[[f64; N]],
    mask: &[bool],
    taps: &[f64],
) -> MaskedSums<N> {
    assert_eq!(values.len(), width * height);
    assert_eq!(mask.len(), width * height);
    assert!(taps.len() % 2 == 1, "kernel length must be odd");
    let hw = taps.len() / 2;

    // Horizontal pass; the weight travels alongside the sums.
    let mut horiz: Vec<([f64; N], f64)> = vec![([0.0; N], 0.0); width * height];
    par::for_each_row(&mut horiz, width, |r, out| {
        let base = r * width;
        for (c, o) in out.iter_mut().enumerate() {
            let lo = c.saturating_sub(hw);
            let hi = (c + hw).min(width - 1);
            let mut acc = [0.0; N];
            let mut wsum = 0.0;
            for cc in lo..=hi {
                let i = base + cc;
                if !mask[i] {
                    continue;
                }
                let k = taps[cc + hw - c];
                let v = &values[i];
                for ch in 0..N {
                    acc[ch] += k * v[ch];
                }
                wsum += k;
            }
            *o = (acc, wsum);
        }
    });

    // Vertical pass, straight into the result.
    let mut both: Vec<([f64; N], f64)> = vec![([0.0; N], 0.0); width * height];
    par::for_each_row(&mut both, width, |r, out| {
        let lo = r.saturating_sub(hw);
        let hi = (r + hw).min(height - 1);
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = [0.0; N];
            let mut wsum = 0.0;
            for rr in lo..=hi {
                let i = rr * width + c;
                let k = taps[rr + hw - r];
                let (v, wt) = &horiz[i];
                for ch in 0..N {
                    acc[ch] += k * v[ch];
                }
                wsum += k * wt;
            }
            *o = (acc, wsum);
        }
    });
    MaskedSums { cells: both }
}

/// Normalized 1-D Gaussian of half-width `hw` and standard deviation `sigma`.
pub fn gaussian_taps(hw: usize, sigma: f64) -> Vec<f64> {
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (0..=2 * hw)
        .map(|i| {
            let d = i as f64 - hw as f64;
            crate::math::exp(-d * d / denom)
        })
        .collect();
    let total: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= total;
    }
    taps
}
