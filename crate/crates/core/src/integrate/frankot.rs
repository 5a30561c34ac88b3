//! Spectral integration on the full frame.
//!
//! The normal equations are solved in the Fourier domain after mirroring the
//! right-hand side into a `2H`×`2W` periodic frame. The mirrored problem's
//! solution is itself mirror symmetric, so its first quadrant satisfies
//! zero-flux (Neumann) conditions at the image border instead of wrapping
//! around: ramps and other non-periodic fields come out exact.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{DepthMap, GradientField};
use crate::error::{Error, Result};
use crate::math::{self, PI};

/// Least-squares depth from a fully valid gradient field.
pub fn integrate_frankot(g: &GradientField) -> Result<DepthMap> {
    if g.mask.iter().any(|&m| !m) {
        return Err(Error::MaskNotFull);
    }
    let (w, h) = (g.width, g.height);
    let (ew, eh) = (2 * w, 2 * h);
    let b = g.divergence();

    let mirror = |i: usize, n: usize| if i < n { i } else { 2 * n - 1 - i };
    let mut rows: Vec<Complex<f64>> = (0..eh)
        .flat_map(|r| (0..ew).map(move |c| (r, c)))
        .map(|(r, c)| Complex::new(b[mirror(r, h) * w + mirror(c, w)], 0.0))
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let fwd_x = planner.plan_fft_forward(ew);
    let fwd_y = planner.plan_fft_forward(eh);
    let inv_x = planner.plan_fft_inverse(ew);
    let inv_y = planner.plan_fft_inverse(eh);

    fwd_x.process(&mut rows);
    let mut cols = transpose(&rows, ew, eh);
    fwd_y.process(&mut cols);

    // Eigenvalues of the periodic graph Laplacian.
    let lx: Vec<f64> = (0..ew).map(|k| 2.0 - 2.0 * math::cos(PI * k as f64 / w as f64)).collect();
    let ly: Vec<f64> = (0..eh).map(|l| 2.0 - 2.0 * math::cos(PI * l as f64 / h as f64)).collect();
    for (k, col) in cols.chunks_mut(eh).enumerate() {
        for (l, v) in col.iter_mut().enumerate() {
            let lambda = lx[k] + ly[l];
            *v = if lambda > 0.0 { *v / lambda } else { Complex::new(0.0, 0.0) };
        }
    }

    inv_y.process(&mut cols);
    let mut rows = transpose(&cols, eh, ew);
    inv_x.process(&mut rows);

    let scale = 1.0 / (ew * eh) as f64;
    let z: Vec<f64> = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .map(|(r, c)| rows[r * ew + c].re * scale)
        .collect();
    Ok(DepthMap::centered(w, h, z, vec![true; w * h]))
}

/// Transposes a row-major `width`×`height` buffer.
fn transpose(src: &[Complex<f64>], width: usize, height: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); src.len()];
    for r in 0..height {
        for c in 0..width {
            out[c * height + r] = src[r * width + c];
        }
    }
    out
}
