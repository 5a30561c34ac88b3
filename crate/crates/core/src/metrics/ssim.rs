use alloc::vec::Vec;

use super::overlap;
use crate::error::Result;
use crate::filter::{gaussian_taps, masked_sums};
use crate::normal::NormalMap;

pub const SSIM_C1: f64 = 0.01;
pub const SSIM_C2: f64 = 0.03;
/// The window is `11×11`.
pub const SSIM_HALF_WINDOW: usize = 5;
pub const SSIM_SIGMA: f64 = 1.5;

/// Channel-wise structural similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimScore {
    /// Mean of the three channel scores, clamped to `[0, 1]`.
    pub value: f64,
    /// Mean SSIM of the x, y and z channels over the compared region.
    pub per_channel: [f64; 3],
    pub n_pixels: usize,
}

/// Mean channel-wise SSIM between `a` and `b`.
///
/// Local statistics use an `11×11` Gaussian window (`σ = 1.5`) whose weights
/// are renormalized over the pixels valid in both maps. Per pixel and
/// channel
///
/// ```text
/// (2 μa μb + c1) (2 σab + c2) / ((μa² + μb² + c1) (σa² + σb² + c2))
/// ```
///
/// with `c1 = 0.01`, `c2 = 0.03`, averaged over the common mask.
pub fn ssim(a: &NormalMap, b: &NormalMap) -> Result<SsimScore> {
    let omega = overlap(a, b)?;
    let (w, h) = a.dims();
    let taps = gaussian_taps(SSIM_HALF_WINDOW, SSIM_SIGMA);
    let n = omega.iter().filter(|&&m| m).count();

    // One channel at a time keeps the filtered moments to five per pixel.
    let mut totals = [0.0; 3];
    for (ch, total) in totals.iter_mut().enumerate() {
        let values: Vec<[f64; 5]> = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| {
                let (x, y) = (x.to_array()[ch], y.to_array()[ch]);
                [x, y, x * x, y * y, x * y]
            })
            .collect();
        let sums = masked_sums(w, h, &values, &omega, &taps);
        drop(values);
        for i in 0..omega.len() {
            if !omega[i] {
                continue;
            }
            let wt = sums.weight(i);
            let s = sums.sum(i);
            let mu_a = s[0] / wt;
            let mu_b = s[1] / wt;
            let var_a = s[2] / wt - mu_a * mu_a;
            let var_b = s[3] / wt - mu_b * mu_b;
            let cov = s[4] / wt - mu_a * mu_b;
            *total += ssim_formula(mu_a, mu_b, var_a, var_b, cov);
        }
    }
    let per_channel = [
        totals[0] / n as f64,
        totals[1] / n as f64,
        totals[2] / n as f64,
    ];
    let value = ((per_channel[0] + per_channel[1] + per_channel[2]) / 3.0).clamp(0.0, 1.0);
    Ok(SsimScore {
        value,
        per_channel,
        n_pixels: n,
    })
}

#[inline]
pub(crate) fn ssim_formula(mu_a: f64, mu_b: f64, var_a: f64, var_b: f64, cov: f64) -> f64 {
    ((2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2))
        / ((mu_a * mu_a + mu_b * mu_b + SSIM_C1) * (var_a + var_b + SSIM_C2))
}
