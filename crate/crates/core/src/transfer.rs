//! Detail transfer: re-applying a detail component to a different shape.
//!
//! The transferred normal at a pixel is the source detail rotated out of the
//! frame of the target shape normal, `n*(r,c) = R(n̄_tgt(r,c) → z)ᵀ · Δ(r,c)`.
//! Every result carries the two similarity checks: the shape component of the
//! output against the target shape, and the re-extracted detail against the
//! source detail.

use alloc::vec;
use alloc::vec::Vec;

use crate::decompose::{decompose, recompose_parts, shape_component, detail_component, Kernel};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricReport};
use crate::normal::rotation::{check_pole, rotation_to_z_raw};
use crate::normal::{NormalMap, Vec3};

/// How a source detail smaller than the target is laid over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tiling {
    /// The source must cover the transferred region.
    #[default]
    None,
    /// The source repeats toroidally.
    Wrap,
}

/// Inputs of [`transfer`] and [`local_transfer`].
///
/// Source pixels are looked up on the target grid directly when both maps
/// have the same dimensions. Otherwise the source's top-left corner is
/// anchored at the top-left corner of the region's bounding box (the whole
/// target mask when there is no region). Invalid source pixels count as flat
/// detail (`+z`).
#[derive(Debug, Clone)]
pub struct TransferRequest<'a> {
    pub source_detail: &'a NormalMap,
    pub target_shape: &'a NormalMap,
    /// Detail of the target, kept outside the region. Defaults to flat.
    pub target_detail: Option<&'a NormalMap>,
    /// Pixels receiving the source detail; must lie inside the target mask.
    pub region: Option<&'a [bool]>,
    pub tiling: Tiling,
    /// Kernel used to re-extract components for the similarity checks.
    pub kernel: Kernel,
}

impl<'a> TransferRequest<'a> {
    /// Global transfer over the whole target mask with the default kernel.
    pub fn new(source_detail: &'a NormalMap, target_shape: &'a NormalMap) -> Self {
        TransferRequest {
            source_detail,
            target_shape,
            target_detail: None,
            region: None,
            tiling: Tiling::None,
            kernel: Kernel::default(),
        }
    }

    pub fn with_region(mut self, region: &'a [bool]) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_target_detail(mut self, detail: &'a NormalMap) -> Self {
        self.target_detail = Some(detail);
        self
    }

    pub fn with_tiling(mut self, tiling: Tiling) -> Self {
        self.tiling = tiling;
        self
    }

    pub fn with_kernel(mut self, kernel: Kernel) -> Self {
        self.kernel = kernel;
        self
    }
}

/// Transferred normals plus the similarity checks over the transferred region.
///
/// With an empty region nothing is transferred; the metrics are then vacuous
/// (`0°`, SSIM `1`, zero pixels).
#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub output: NormalMap,
    /// MAE between the shape component of `output` and the target shape.
    pub shape_mae_deg: f64,
    /// MAE between the re-extracted detail and the source detail.
    pub detail_mae_deg: f64,
    /// SSIM between the re-extracted detail and the source detail.
    pub detail_ssim: f64,
    /// Number of pixels the metrics were computed over.
    pub n_pixels: usize,
}

/// Resolved region mask and source lookup for a request.
struct Layout {
    region: Vec<bool>,
    /// Source detail resampled onto the target grid, `+z` outside the region.
    source: Vec<Vec3>,
}

fn layout(req: &TransferRequest<'_>) -> Result<Layout> {
    let target = req.target_shape;
    let (tw, th) = target.dims();
    let region: Vec<bool> = match req.region {
        Some(r) => {
            if r.len() != target.len() {
                return Err(Error::DimensionMismatch {
                    expected: (tw, th),
                    found: (r.len(), 1),
                });
            }
            if r.iter().zip(target.mask()).any(|(&inside, &valid)| inside && !valid) {
                return Err(Error::RegionOutOfBounds);
            }
            r.to_vec()
        }
        None => target.mask().to_vec(),
    };
    if let Some(d) = req.target_detail {
        target.require_same_grid(d)?;
    }

    let src = req.source_detail;
    let (sw, sh) = src.dims();
    let mut source = vec![Vec3::Z; target.len()];
    let Some((r0, c0, r1, c1)) = bounding_box(&region, tw) else {
        return Ok(Layout { region, source });
    };
    let (ar, ac) = if src.dims() == target.dims() { (0, 0) } else { (r0, c0) };
    if req.tiling == Tiling::None && (r1 - ar >= sh || c1 - ac >= sw) {
        return Err(Error::DimensionMismatch {
            expected: (c1 - ac + 1, r1 - ar + 1),
            found: (sw, sh),
        });
    }
    for r in r0..=r1 {
        for c in c0..=c1 {
            let i = r * tw + c;
            if !region[i] {
                continue;
            }
            let (sr, sc) = ((r - ar) % sh, (c - ac) % sw);
            if let Some(v) = src.get(sr, sc) {
                source[i] = v;
            }
        }
    }
    Ok(Layout { region, source })
}

/// `(r0, c0, r1, c1)` inclusive bounds of the set pixels.
fn bounding_box(mask: &[bool], width: usize) -> Option<(usize, usize, usize, usize)> {
    let mut bb: Option<(usize, usize, usize, usize)> = None;
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let (r, c) = (i / width, i % width);
        bb = Some(match bb {
            None => (r, c, r, c),
            Some((r0, c0, r1, c1)) => (r0.min(r), c0.min(c), r1.max(r), c1.max(c)),
        });
    }
    bb
}

/// Rotates per-pixel details out of the target shape frames.
fn apply_details(shape: &NormalMap, details: &[Vec3]) -> Result<NormalMap> {
    let w = shape.width();
    shape.map_valid(|r, c, s| {
        check_pole(s).map_err(|e| e.at_pixel(r, c))?;
        Ok(rotation_to_z_raw(s).apply_transpose(details[r * w + c]))
    })
}

fn target_details(req: &TransferRequest<'_>) -> Vec<Vec3> {
    match req.target_detail {
        Some(d) => d
            .data()
            .iter()
            .zip(d.mask())
            .map(|(&v, &m)| if m { v } else { Vec3::Z })
            .collect(),
        None => vec![Vec3::Z; req.target_shape.len()],
    }
}

fn finish(req: &TransferRequest<'_>, output: NormalMap, layout: &Layout) -> Result<TransferResult> {
    if !layout.region.iter().any(|&m| m) {
        return Ok(TransferResult {
            output,
            shape_mae_deg: 0.0,
            detail_mae_deg: 0.0,
            detail_ssim: 1.0,
            n_pixels: 0,
        });
    }
    let shape_star = shape_component(&output, &req.kernel)?;
    let detail_star = detail_component(&output, &shape_star)?;
    let shape_mae_deg = metrics::mae(
        &shape_star.restricted(&layout.region)?,
        &req.target_shape.restricted(&layout.region)?,
    )?;
    let source = NormalMap::from_parts(
        output.width(),
        output.height(),
        layout.source.clone(),
        layout.region.clone(),
    )
    .restricted(&layout.region)?;
    let report = metrics::compare(&detail_star.restricted(&layout.region)?, &source)?;
    Ok(TransferResult {
        output,
        shape_mae_deg,
        detail_mae_deg: report.mae_deg,
        detail_ssim: report.ssim,
        n_pixels: report.n_pixels,
    })
}

/// Applies the source detail to the target shape inside the region (hard
/// edge). Outside the region the target keeps its own detail.
pub fn transfer(req: &TransferRequest<'_>) -> Result<TransferResult> {
    let layout = layout(req)?;
    let mut details = target_details(req);
    for (i, d) in details.iter_mut().enumerate() {
        if layout.region[i] {
            *d = layout.source[i];
        }
    }
    let output = apply_details(req.target_shape, &details)?;
    finish(req, output, &layout)
}

/// Like [`transfer`] but feathers the seam outside the region. Target pixels
/// within `b = 2w` pixels (chessboard distance) of the region blend the
/// source detail of their nearest region pixel into their own detail with
/// weight `(b + 1 - d) / (b + 1)` before recomposition. Inside the region the
/// result equals [`transfer`]; beyond the band the target is untouched.
pub fn local_transfer(req: &TransferRequest<'_>) -> Result<TransferResult> {
    let layout = layout(req)?;
    let band = 2 * req.kernel.half_width();
    let (w, h) = req.target_shape.dims();
    let (dist, nearest) = chessboard_distance(&layout.region, w, h);
    let mut details = target_details(req);
    for (i, d) in details.iter_mut().enumerate() {
        if layout.region[i] {
            *d = layout.source[i];
            continue;
        }
        if !req.target_shape.mask()[i] || dist[i] as usize > band {
            continue;
        }
        let alpha = (band + 1 - dist[i] as usize) as f64 / (band + 1) as f64;
        let src = layout.source[nearest[i]];
        *d = (src * alpha + *d * (1.0 - alpha))
            .normalized()
            .unwrap_or(if alpha >= 0.5 { src } else { *d });
    }
    let output = apply_details(req.target_shape, &details)?;
    finish(req, output, &layout)
}

/// Chessboard distance from every pixel to the nearest set pixel of `seeds`
/// (`u32::MAX` when there is none) and the index of that seed. Two-pass
/// chamfer sweep; distances are exact for this metric.
fn chessboard_distance(seeds: &[bool], width: usize, height: usize) -> (Vec<u32>, Vec<usize>) {
    const FAR: u32 = u32::MAX;
    let mut d: Vec<u32> = seeds.iter().map(|&s| if s { 0 } else { FAR }).collect();
    let mut from: Vec<usize> = (0..seeds.len()).collect();
    let mut relax = |d: &mut Vec<u32>, i: usize, j: usize| {
        let cand = d[j].saturating_add(1);
        if cand < d[i] {
            d[i] = cand;
            from[i] = from[j];
        }
    };
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            if c > 0 {
                relax(&mut d, i, i - 1);
            }
            if r > 0 {
                relax(&mut d, i, i - width);
                if c > 0 {
                    relax(&mut d, i, i - width - 1);
                }
                if c + 1 < width {
                    relax(&mut d, i, i - width + 1);
                }
            }
        }
    }
    for r in (0..height).rev() {
        for c in (0..width).rev() {
            let i = r * width + c;
            if c + 1 < width {
                relax(&mut d, i, i + 1);
            }
            if r + 1 < height {
                relax(&mut d, i, i + width);
                if c + 1 < width {
                    relax(&mut d, i, i + width + 1);
                }
                if c > 0 {
                    relax(&mut d, i, i + width - 1);
                }
            }
        }
    }
    (d, from)
}

/// Moves a detail component across `shapes` one after another: each hop
/// transfers the current detail onto the next shape and re-extracts it with
/// `k`. Returns, per hop, the re-extracted detail compared with `detail`.
pub fn transfer_roundtrip_chain(
    detail: &NormalMap,
    shapes: &[NormalMap],
    k: &Kernel,
) -> Result<Vec<MetricReport>> {
    let mut current = detail.clone();
    let mut reports = Vec::with_capacity(shapes.len());
    for shape in shapes {
        let req = TransferRequest::new(&current, shape).with_kernel(k.clone());
        let layout = layout(&req)?;
        let output = apply_details(shape, &layout.source)?;
        current = decompose(&output, k)?.detail;
        reports.push(metrics::compare(&current, detail)?);
    }
    Ok(reports)
}

/// Recomposes a target from its own shape and detail; the `region = ∅`
/// result of [`transfer`].
pub fn recompose_target(shape: &NormalMap, detail: Option<&NormalMap>) -> Result<NormalMap> {
    match detail {
        Some(d) => recompose_parts(shape, d),
        None => Ok(shape.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::normal::{angle_between, UnitVec3};
    use crate::synthetic::{self, Surface};

    fn bump_detail(n: usize) -> NormalMap {
        decompose(&synthetic::bumps(n, n, 0.5, 6.0), &Kernel::default())
            .unwrap()
            .detail
    }

    fn hemisphere_shape(n: usize) -> NormalMap {
        shape_component(&synthetic::full_frame_sphere(n, n), &Kernel::default()).unwrap()
    }

    #[test]
    fn flat_detail_reproduces_target_shape() {
        let shape = hemisphere_shape(32);
        let flat = NormalMap::constant(32, 32, UnitVec3::Z);
        let res = transfer(&TransferRequest::new(&flat, &shape)).unwrap();
        for (a, b) in res.output.data().iter().zip(shape.data()) {
            assert!((*a - *b).norm() <= 1e-12);
        }
    }

    #[test]
    fn flat_target_reproduces_detail_exactly() {
        let detail = bump_detail(32);
        let flat = NormalMap::constant(32, 32, UnitVec3::Z);
        let res = transfer(&TransferRequest::new(&detail, &flat)).unwrap();
        assert_eq!(res.output.data(), detail.data());
    }

    #[test]
    fn bump_detail_onto_hemisphere() {
        let detail = bump_detail(128);
        let shape = hemisphere_shape(128);
        let res = transfer(&TransferRequest::new(&detail, &shape)).unwrap();
        assert!(res.detail_ssim >= 0.99, "ssim {}", res.detail_ssim);
        assert!(res.shape_mae_deg <= 3.0, "shape mae {}", res.shape_mae_deg);
        for v in res.output.data() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_source_pixel_changes_one_output_pixel() {
        let mut data = bump_detail(24).data().to_vec();
        let shape = hemisphere_shape(24);
        let a = NormalMap::from_vectors(24, 24, data.clone()).unwrap();
        data[5 * 24 + 7] = Vec3::new(0.3, -0.2, 0.9);
        let b = NormalMap::from_vectors(24, 24, data).unwrap();
        let oa = transfer(&TransferRequest::new(&a, &shape)).unwrap().output;
        let ob = transfer(&TransferRequest::new(&b, &shape)).unwrap().output;
        let changed: Vec<usize> = (0..oa.len()).filter(|&i| oa.data()[i] != ob.data()[i]).collect();
        assert_eq!(changed, vec![5 * 24 + 7]);
    }

    #[test]
    fn small_source_needs_tiling() {
        let detail = bump_detail(16);
        let shape = hemisphere_shape(40);
        let err = transfer(&TransferRequest::new(&detail, &shape)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let res = transfer(&TransferRequest::new(&detail, &shape).with_tiling(Tiling::Wrap)).unwrap();
        // Wrapped lookup: output at (r, c) carries source pixel (r % 16, c % 16).
        let flat = NormalMap::constant(40, 40, UnitVec3::Z);
        let tiled = transfer(&TransferRequest::new(&detail, &flat).with_tiling(Tiling::Wrap))
            .unwrap()
            .output;
        assert_eq!(tiled.at(37, 21), detail.at(5, 5));
        assert!(res.output.is_fully_valid());
    }

    #[test]
    fn source_anchors_at_region_corner() {
        let detail = bump_detail(16);
        let flat = NormalMap::constant(40, 40, UnitVec3::Z);
        let mut region = vec![false; 40 * 40];
        for r in 10..26 {
            for c in 20..36 {
                region[r * 40 + c] = true;
            }
        }
        let out = transfer(&TransferRequest::new(&detail, &flat).with_region(&region))
            .unwrap()
            .output;
        assert_eq!(out.at(10, 20), detail.at(0, 0));
        assert_eq!(out.at(25, 35), detail.at(15, 15));
        assert_eq!(out.at(0, 0), Vec3::Z);
    }

    #[test]
    fn region_outside_mask_is_rejected() {
        let shape = shape_component(&synthetic::sphere_cap(32, 32, 10.0), &Kernel::default()).unwrap();
        let detail = NormalMap::constant(32, 32, UnitVec3::Z);
        let region = vec![true; 32 * 32];
        let err = transfer(&TransferRequest::new(&detail, &shape).with_region(&region)).unwrap_err();
        assert!(matches!(err, Error::RegionOutOfBounds));
    }

    #[test]
    fn local_transfer_with_full_region_is_global() {
        let detail = bump_detail(48);
        let shape = hemisphere_shape(48);
        let region = vec![true; 48 * 48];
        let global = transfer(&TransferRequest::new(&detail, &shape)).unwrap();
        let local = local_transfer(&TransferRequest::new(&detail, &shape).with_region(&region)).unwrap();
        assert_eq!(global, local);
    }

    #[test]
    fn local_transfer_with_empty_region_keeps_target() {
        let target = decompose(&synthetic::bumpy_sphere(48, 48, 0.5, 7.0), &Kernel::default()).unwrap();
        let detail = bump_detail(48);
        let region = vec![false; 48 * 48];
        let req = TransferRequest::new(&detail, &target.shape)
            .with_target_detail(&target.detail)
            .with_region(&region);
        let res = local_transfer(&req).unwrap();
        let expected = recompose_target(&target.shape, Some(&target.detail)).unwrap();
        assert_eq!(res.output, expected);
        assert_eq!(res.n_pixels, 0);
    }

    #[test]
    fn local_transfer_feathers_the_seam() {
        let n = 128;
        let target = decompose(&synthetic::full_frame_sphere(n, n), &Kernel::default()).unwrap();
        let k10 = Kernel::gaussian_default(10).unwrap();
        let coarse = decompose(
            &Surface::EggCrate {
                amplitude: 2.0,
                period: 16.0,
            }
            .render(n, n),
            &k10,
        )
        .unwrap()
        .detail;
        let mut region = vec![false; n * n];
        for r in 48..80 {
            for c in 48..80 {
                region[r * n + c] = true;
            }
        }
        let req = TransferRequest::new(&coarse, &target.shape)
            .with_target_detail(&target.detail)
            .with_region(&region)
            .with_kernel(k10);
        let res = local_transfer(&req).unwrap();
        assert!(res.detail_ssim >= 0.98, "ssim {}", res.detail_ssim);
        let hard = transfer(&req).unwrap();
        let base = recompose_target(&target.shape, Some(&target.detail)).unwrap();
        for i in 0..n * n {
            let (r, c) = (i / n, i % n);
            if region[i] {
                assert_eq!(res.output.data()[i], hard.output.data()[i]);
            } else if r.abs_diff(63) > 16 + 20 || c.abs_diff(63) > 16 + 20 {
                assert_eq!(res.output.data()[i], base.data()[i]);
            }
        }
        // Just outside the region the output leans towards the patch.
        let near = angle_between(res.output.at(47, 60), base.at(47, 60));
        let far = angle_between(res.output.at(30, 60), base.at(30, 60));
        assert!(near > far && far > 0.0);
    }

    #[test]
    fn chessboard_distance_matches_brute_force() {
        let (w, h) = (13, 9);
        let seeds: Vec<bool> = (0..w * h).map(|i| i % 17 == 3).collect();
        let (d, from) = chessboard_distance(&seeds, w, h);
        for i in 0..w * h {
            let (r, c) = ((i / w) as i64, (i % w) as i64);
            let brute = (0..w * h)
                .filter(|&j| seeds[j])
                .map(|j| ((j / w) as i64 - r).abs().max(((j % w) as i64 - c).abs()) as u32)
                .min()
                .unwrap();
            assert_eq!(d[i], brute);
            let j = from[i];
            assert!(seeds[j]);
            assert_eq!(((j / w) as i64 - r).abs().max(((j % w) as i64 - c).abs()) as u32, brute);
        }
    }

    #[test]
    fn chain_of_flat_detail_is_exact() {
        let flat = NormalMap::constant(32, 32, UnitVec3::Z);
        let shapes = vec![NormalMap::constant(32, 32, UnitVec3::Z)];
        let reports = transfer_roundtrip_chain(&flat, &shapes, &Kernel::default()).unwrap();
        assert_eq!(reports[0].mae_deg, 0.0);
        assert_eq!(reports[0].ssim, 1.0);
    }

    #[test]
    fn chain_degrades_slowly() {
        let n = 96;
        let detail = bump_detail(n);
        let shapes: Vec<NormalMap> = (0..10)
            .map(|i| {
                let s = Surface::Sphere {
                    radius: n as f64 * (1.0 + 0.3 * i as f64),
                }
                .plus(Surface::Quadric {
                    a: 0.0005 * i as f64,
                    b: -0.0003 * i as f64,
                    c: 0.0,
                });
                shape_component(&s.render(n, n), &Kernel::default()).unwrap()
            })
            .collect();
        let reports = transfer_roundtrip_chain(&detail, &shapes, &Kernel::default()).unwrap();
        let last = reports.last().unwrap();
        assert!(last.ssim >= 0.99, "{last:?}");
        assert!(last.mae_deg <= 5.0, "{last:?}");
        for pair in reports.windows(2) {
            assert!(pair[1].ssim <= pair[0].ssim + 1e-4);
        }
    }
}
