//! Exemplar-based growth of a detail swatch (Efros–Leung, pixel at a time).
//!
//! The output starts from a seed patch copied from the swatch and grows in
//! onion-shell order: unfilled pixels bordering the filled area are visited
//! by decreasing number of filled neighbours. Each pixel compares its known
//! neighbourhood with every compatible swatch neighbourhood under a Gaussian
//! weighted SSD on the three detail channels, then copies the centre of one
//! candidate drawn uniformly from those within `(1 + tol)` of the best match.
//! Output pixels are exact copies of swatch pixels.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::{decompose, Kernel};
use crate::error::{Error, Result};
use crate::math;
use crate::normal::{NormalMap, Vec3};
use crate::transfer::{transfer, TransferRequest, TransferResult};

pub const DEFAULT_WINDOW: usize = 11;
pub const DEFAULT_TOLERANCE: f64 = 0.1;

/// Where the initial swatch patch goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedPlacement {
    /// A random swatch patch at the centre of the output.
    #[default]
    Random,
    /// The top-left swatch patch at the top-left of the output.
    Origin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisParams {
    /// Odd neighbourhood side, at least 3.
    pub window: usize,
    /// Relative slack over the best match distance, in `(0, 1]`.
    pub err_tolerance: f64,
    pub seed: u64,
    pub out_width: usize,
    pub out_height: usize,
    pub placement: SeedPlacement,
}

impl SynthesisParams {
    pub fn new(out_width: usize, out_height: usize, seed: u64) -> Self {
        SynthesisParams {
            window: DEFAULT_WINDOW,
            err_tolerance: DEFAULT_TOLERANCE,
            seed,
            out_width,
            out_height,
            placement: SeedPlacement::Random,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "synthesis window must be odd and at least 3, got {}",
                self.window
            )));
        }
        if !(self.err_tolerance > 0.0 && self.err_tolerance <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "error tolerance must lie in (0, 1], got {}",
                self.err_tolerance
            )));
        }
        if self.out_width < self.window || self.out_height < self.window {
            return Err(Error::InvalidParameter(alloc::format!(
                "output {}x{} is smaller than the window",
                self.out_width,
                self.out_height
            )));
        }
        Ok(())
    }
}

/// A fully valid detail component to synthesize from.
#[derive(Debug, Clone, PartialEq)]
pub struct Swatch {
    detail: NormalMap,
    half_width: usize,
}

impl Swatch {
    /// Wraps an already extracted detail component; `half_width` records the
    /// kernel it was extracted with.
    pub fn new(detail: NormalMap, half_width: usize) -> Result<Self> {
        if !detail.is_fully_valid() {
            return Err(Error::InvalidMap("swatch must be fully valid".into()));
        }
        Ok(Swatch { detail, half_width })
    }

    /// Separates the detail component of a raw normal patch.
    pub fn from_normals(n: &NormalMap, k: &Kernel) -> Result<Self> {
        Swatch::new(decompose(n, k)?.detail, k.half_width())
    }

    pub fn detail(&self) -> &NormalMap {
        &self.detail
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }
}

struct Known {
    dr: isize,
    dc: isize,
    weight: f64,
    value: Vec3,
}

/// Grows `swatch` into a fully valid `out_width`×`out_height` detail map.
pub fn synthesize_detail(swatch: &Swatch, p: &SynthesisParams) -> Result<NormalMap> {
    p.validate()?;
    let src = &swatch.detail;
    let (sw, sh) = src.dims();
    if sw < p.window || sh < p.window {
        return Err(Error::SwatchTooSmall {
            width: sw,
            height: sh,
            window: p.window,
        });
    }
    let (ow, oh) = (p.out_width, p.out_height);
    let half = (p.window / 2) as isize;
    let sigma = p.window as f64 / 6.4;
    let gauss = |dr: isize, dc: isize| math::exp(-((dr * dr + dc * dc) as f64) / (2.0 * sigma * sigma));

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut out = vec![Vec3::ZERO; ow * oh];
    let mut filled = vec![false; ow * oh];

    let (sr0, sc0, or0, oc0) = match p.placement {
        SeedPlacement::Origin => (0, 0, 0, 0),
        SeedPlacement::Random => (
            rng.random_range(0..=sh - p.window),
            rng.random_range(0..=sw - p.window),
            (oh - p.window) / 2,
            (ow - p.window) / 2,
        ),
    };
    for r in 0..p.window {
        for c in 0..p.window {
            let i = (or0 + r) * ow + oc0 + c;
            out[i] = src.at(sr0 + r, sc0 + c);
            filled[i] = true;
        }
    }

    let mut remaining = ow * oh - p.window * p.window;
    let mut known: Vec<Known> = Vec::with_capacity(p.window * p.window);
    let mut distances: Vec<f64> = vec![0.0; sw * sh];
    while remaining > 0 {
        // Frontier: unfilled pixels with at least one filled 8-neighbour,
        // ordered by filled-neighbour count in the window, then raster order.
        let mut frontier: Vec<(usize, usize)> = Vec::new();
        for i in 0..ow * oh {
            if filled[i] {
                continue;
            }
            let (r, c) = ((i / ow) as isize, (i % ow) as isize);
            if neighbours_filled(&filled, ow, oh, r, c, 1) == 0 {
                continue;
            }
            frontier.push((neighbours_filled(&filled, ow, oh, r, c, half), i));
        }
        if frontier.is_empty() {
            let i = filled.iter().position(|&f| !f).unwrap_or(0);
            return Err(Error::NonConvergence { row: i / ow, col: i % ow });
        }
        frontier.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        for &(_, i) in &frontier {
            let (r, c) = ((i / ow) as isize, (i % ow) as isize);
            known.clear();
            for dr in -half..=half {
                for dc in -half..=half {
                    let (rr, cc) = (r + dr, c + dc);
                    if rr < 0 || cc < 0 || rr >= oh as isize || cc >= ow as isize {
                        continue;
                    }
                    let j = rr as usize * ow + cc as usize;
                    if filled[j] {
                        known.push(Known {
                            dr,
                            dc,
                            weight: gauss(dr, dc),
                            value: out[j],
                        });
                    }
                }
            }
            let total: f64 = known.iter().map(|k| k.weight).sum();
            // Candidate centres keep every known offset inside the swatch.
            let (mut rlo, mut rhi, mut clo, mut chi) = (0isize, 0isize, 0isize, 0isize);
            for k in &known {
                rlo = rlo.min(k.dr);
                rhi = rhi.max(k.dr);
                clo = clo.min(k.dc);
                chi = chi.max(k.dc);
            }
            let rows = (-rlo) as usize..(sh as isize - rhi) as usize;
            let cols = (-clo) as usize..(sw as isize - chi) as usize;
            candidate_distances(src, &known, total, rows.clone(), cols.clone(), &mut distances);

            let mut best = f64::INFINITY;
            for sr in rows.clone() {
                for sc in cols.clone() {
                    best = best.min(distances[sr * sw + sc]);
                }
            }
            let limit = best * (1.0 + p.err_tolerance);
            let mut picks: Vec<usize> = Vec::new();
            for sr in rows.clone() {
                for sc in cols.clone() {
                    if distances[sr * sw + sc] <= limit {
                        picks.push(sr * sw + sc);
                    }
                }
            }
            if picks.is_empty() {
                return Err(Error::NonConvergence {
                    row: r as usize,
                    col: c as usize,
                });
            }
            let pick = picks[rng.random_range(0..picks.len())];
            out[i] = src.data()[pick];
            filled[i] = true;
            remaining -= 1;
        }
    }
    Ok(NormalMap::from_parts(ow, oh, out, vec![true; ow * oh]))
}

fn neighbours_filled(filled: &[bool], w: usize, h: usize, r: isize, c: isize, half: isize) -> usize {
    let mut n = 0;
    for dr in -half..=half {
        for dc in -half..=half {
            let (rr, cc) = (r + dr, c + dc);
            if (dr, dc) == (0, 0) || rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                continue;
            }
            n += filled[rr as usize * w + cc as usize] as usize;
        }
    }
    n
}

/// Weighted mean squared difference between the known template and the
/// swatch neighbourhood of every candidate centre.
fn candidate_distances(
    src: &NormalMap,
    known: &[Known],
    total: f64,
    rows: core::ops::Range<usize>,
    cols: core::ops::Range<usize>,
    out: &mut [f64],
) {
    let sw = src.width();
    let data = src.data();
    let eval = |sr: usize, row: &mut [f64]| {
        for sc in cols.clone() {
            let mut d = 0.0;
            for k in known {
                let j = (sr as isize + k.dr) as usize * sw + (sc as isize + k.dc) as usize;
                d += k.weight * (data[j] - k.value).norm_squared();
            }
            row[sc] = d / total;
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(sw)
            .enumerate()
            .filter(|(sr, _)| rows.contains(sr))
            .for_each(|(sr, row)| eval(sr, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (sr, row) in out.chunks_mut(sw).enumerate() {
            if rows.contains(&sr) {
                eval(sr, row);
            }
        }
    }
}

/// Synthesizes a detail map the size of `target_shape` and transfers it onto
/// that shape. `p.out_width` and `p.out_height` are ignored.
pub fn synthesize_onto(
    swatch: &Swatch,
    target_shape: &NormalMap,
    p: &SynthesisParams,
    k: &Kernel,
) -> Result<TransferResult> {
    let mut p = p.clone();
    p.out_width = target_shape.width();
    p.out_height = target_shape.height();
    let detail = synthesize_detail(swatch, &p)?;
    transfer(&TransferRequest::new(&detail, target_shape).with_kernel(k.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::shape_component;
    use crate::normal::{angle_between, UnitVec3};
    use crate::synthetic;

    fn bump_swatch(n: usize) -> Swatch {
        Swatch::from_normals(&synthetic::bumps(n, n, 1.0, 8.0), &Kernel::default()).unwrap()
    }

    #[test]
    fn constant_swatch_gives_constant_output() {
        let sw = Swatch::new(NormalMap::constant(16, 16, UnitVec3::Z), 5).unwrap();
        let out = synthesize_detail(&sw, &SynthesisParams::new(40, 40, 1)).unwrap();
        assert!(out.data().iter().all(|&v| v == Vec3::Z));
    }

    #[test]
    fn origin_seed_with_equal_size_copies_the_swatch() {
        let raw = synthetic::random_waves(9, 6, 6.0, 0.8).render(24, 24);
        let sw = Swatch::from_normals(&raw, &Kernel::default()).unwrap();
        let mut p = SynthesisParams::new(24, 24, 3);
        p.placement = SeedPlacement::Origin;
        let out = synthesize_detail(&sw, &p).unwrap();
        assert_eq!(out.data(), sw.detail().data());
    }

    #[test]
    fn same_seed_same_output() {
        let sw = bump_swatch(24);
        let p = SynthesisParams::new(36, 30, 42);
        let a = synthesize_detail(&sw, &p).unwrap();
        let b = synthesize_detail(&sw, &p).unwrap();
        assert_eq!(a, b);
        let mut q = p.clone();
        q.seed = 43;
        assert_ne!(synthesize_detail(&sw, &q).unwrap(), a);
    }

    #[test]
    fn output_pixels_are_swatch_pixels() {
        let sw = bump_swatch(24);
        let out = synthesize_detail(&sw, &SynthesisParams::new(32, 32, 5)).unwrap();
        for v in out.data() {
            assert!(sw.detail().data().contains(v));
            assert!((v.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn parameter_errors() {
        let sw = bump_swatch(8);
        let err = synthesize_detail(&sw, &SynthesisParams::new(32, 32, 0)).unwrap_err();
        assert!(matches!(err, Error::SwatchTooSmall { .. }));
        let sw = bump_swatch(16);
        let mut p = SynthesisParams::new(32, 32, 0);
        p.window = 4;
        assert!(matches!(synthesize_detail(&sw, &p), Err(Error::InvalidParameter(_))));
        p.window = 5;
        p.err_tolerance = 0.0;
        assert!(matches!(synthesize_detail(&sw, &p), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn bump_swatch_onto_flat_is_the_detail() {
        let sw = bump_swatch(24);
        let flat = NormalMap::constant(32, 32, UnitVec3::Z);
        let p = SynthesisParams::new(0, 0, 11);
        let res = synthesize_onto(&sw, &flat, &p, &Kernel::default()).unwrap();
        let mut q = p.clone();
        q.out_width = 32;
        q.out_height = 32;
        assert_eq!(res.output, synthesize_detail(&sw, &q).unwrap());
    }

    #[test]
    fn constant_swatch_onto_hemisphere_is_the_shape() {
        let shape = shape_component(&synthetic::full_frame_sphere(32, 32), &Kernel::default()).unwrap();
        let sw = Swatch::new(NormalMap::constant(16, 16, UnitVec3::Z), 5).unwrap();
        let res = synthesize_onto(&sw, &shape, &SynthesisParams::new(0, 0, 2), &Kernel::default()).unwrap();
        for (a, b) in res.output.data().iter().zip(shape.data()) {
            assert!(angle_between(*a, *b) < 1e-12);
        }
    }

    #[test]
    fn bump_swatch_onto_hemisphere_keeps_the_shape() {
        let shape = shape_component(&synthetic::full_frame_sphere(48, 48), &Kernel::default()).unwrap();
        let res = synthesize_onto(&bump_swatch(32), &shape, &SynthesisParams::new(0, 0, 8), &Kernel::default()).unwrap();
        assert!(res.shape_mae_deg <= 3.0, "{}", res.shape_mae_deg);
    }
}
