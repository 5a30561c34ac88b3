//! Subcommand bodies. Each returns the report printed on success.

use std::path::Path;
use std::time::Duration;

use normcraft_core::decompose::{decompose, shape_component, Kernel, KernelKind};
use normcraft_core::integrate::{
    depth_to_mesh, integrate_frankot, integrate_poisson, normals_to_gradients, PoissonOptions,
};
use normcraft_core::metrics::{mae, rotation_similarity, ssim};
use normcraft_core::superres::{upsample, BicubicEnhancer, DetailEnhancer, UpsampleSpec};
use normcraft_core::synthesis::{synthesize_detail, synthesize_onto, SeedPlacement, Swatch, SynthesisParams};
use normcraft_core::transfer::{local_transfer, transfer, Tiling, TransferRequest};
use normcraft_core::Error as CoreError;

use super::*;
use crate::enhancer::ExternalEnhancer;
use crate::error::Result;
use crate::io;

pub fn execute(cli: &Cli) -> Result<Report> {
    let precision = Precision::from(cli.precision);
    match &cli.command {
        Command::Decompose(a) => decompose_cmd(a, precision),
        Command::Transfer(a) => transfer_cmd(a, precision),
        Command::Synthesize(a) => synthesize_cmd(a, precision),
        Command::Upsample(a) => upsample_cmd(a, precision),
        Command::Integrate(a) => integrate_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
    }
}

fn kernel_params(r: &mut Report, k: &Kernel) {
    r.param("w", k.half_width());
    match k.kind() {
        KernelKind::Average => {
            r.param("kernel", "avg");
        }
        _ => {
            r.param("kernel", "gauss");
            r.param_f64("sigma", k.sigma().unwrap_or(f64::NAN));
        }
    }
}

fn dims(r: &mut Report, width: usize, height: usize) {
    r.result("width", width).result("height", height);
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn decompose_cmd(a: &DecomposeArgs, precision: Precision) -> Result<Report> {
    let k = a.kernel.build()?;
    let n = io::load(&a.input)?;
    let parts = decompose(&n, &k)?;
    io::save(&parts.shape, &a.shape_out, precision)?;
    io::save(&parts.detail, &a.detail_out, precision)?;
    let mut r = Report::new("decompose");
    kernel_params(&mut r, &k);
    dims(&mut r, n.width(), n.height());
    r.result("valid_pixels", n.valid_count());
    Ok(r)
}

fn transfer_cmd(a: &TransferArgs, precision: Precision) -> Result<Report> {
    let k = a.kernel.build()?;
    let detail = io::load(&a.detail)?;
    let shape = io::load(&a.shape)?;
    let target_detail = a.target_detail.as_deref().map(io::load).transpose()?;
    let region = a
        .region
        .as_deref()
        .map(|p| io::load_mask(p, shape.dims()))
        .transpose()?;

    let mut req = TransferRequest::new(&detail, &shape).with_kernel(k.clone());
    if let Some(d) = &target_detail {
        req = req.with_target_detail(d);
    }
    if let Some(m) = &region {
        req = req.with_region(m);
    }
    if a.tile {
        req = req.with_tiling(Tiling::Wrap);
    }
    let res = if a.local { local_transfer(&req)? } else { transfer(&req)? };
    io::save(&res.output, &a.output, precision)?;

    let mut r = Report::new("transfer");
    kernel_params(&mut r, &k);
    r.param("tile", a.tile).param("local", a.local);
    if a.local {
        r.param("feather", 2 * k.half_width());
    }
    r.param("region", a.region.as_deref().map_or("all".into(), path_str));
    dims(&mut r, shape.width(), shape.height());
    r.result_f64("shape_mae_deg", res.shape_mae_deg)
        .result_f64("detail_mae_deg", res.detail_mae_deg)
        .result_f64("detail_ssim", res.detail_ssim)
        .result("n_pixels", res.n_pixels);
    if let Some(p) = &a.report {
        std::fs::write(p, r.to_json()).map_err(|e| crate::Error::io(p, e))?;
    }
    Ok(r)
}

fn synthesize_cmd(a: &SynthesizeArgs, precision: Precision) -> Result<Report> {
    let k = a.kernel.build()?;
    let raw = io::load(&a.swatch)?;
    let swatch = if a.detail_input {
        Swatch::new(raw, k.half_width())?
    } else {
        Swatch::from_normals(&raw, &k)?
    };
    let mut p = SynthesisParams::new(a.width, a.height, a.seed);
    p.window = a.window;
    p.err_tolerance = a.tol;
    p.placement = match a.placement {
        PlacementArg::Random => SeedPlacement::Random,
        PlacementArg::Origin => SeedPlacement::Origin,
    };

    let mut r = Report::new("synthesize");
    kernel_params(&mut r, &k);
    r.param("window", p.window)
        .param_f64("tol", p.err_tolerance)
        .param("seed", p.seed)
        .param("placement", if p.placement == SeedPlacement::Random { "random" } else { "origin" })
        .param("detail_input", a.detail_input);
    match &a.onto {
        Some(shape_path) => {
            let shape = io::load(shape_path)?;
            let res = synthesize_onto(&swatch, &shape, &p, &k)?;
            io::save(&res.output, &a.output, precision)?;
            r.param("onto", path_str(shape_path));
            dims(&mut r, shape.width(), shape.height());
            r.result_f64("shape_mae_deg", res.shape_mae_deg)
                .result_f64("detail_mae_deg", res.detail_mae_deg)
                .result_f64("detail_ssim", res.detail_ssim);
        }
        None => {
            let out = synthesize_detail(&swatch, &p)?;
            io::save(&out, &a.output, precision)?;
            dims(&mut r, out.width(), out.height());
        }
    }
    Ok(r)
}

fn upsample_cmd(a: &UpsampleArgs, precision: Precision) -> Result<Report> {
    let k = a.kernel.build()?;
    let spec = UpsampleSpec::new(a.factor)?;
    if !(a.timeout > 0.0 && a.timeout.is_finite()) {
        return Err(CoreError::InvalidParameter(format!("timeout must be positive, got {}", a.timeout)).into());
    }
    let n = io::load(&a.input)?;
    let external = a
        .detail_cmd
        .as_ref()
        .map(|p| ExternalEnhancer::new(p).with_timeout(Duration::from_secs_f64(a.timeout)));
    let enhancer: &dyn DetailEnhancer = match &external {
        Some(e) => e,
        None => &BicubicEnhancer,
    };
    let up = upsample(&n, &spec, &k, enhancer)?;
    io::save(&up, &a.output, precision)?;

    let mut r = Report::new("upsample");
    kernel_params(&mut r, &k);
    r.param("factor", spec.factor())
        .param("enhancer", a.detail_cmd.as_deref().map_or("bicubic".into(), path_str));
    dims(&mut r, up.width(), up.height());
    Ok(r)
}

fn integrate_cmd(a: &IntegrateArgs) -> Result<Report> {
    let n = io::load(&a.input)?;
    let g = normals_to_gradients(&n);
    if g.clamped > 0 {
        log::warn!("{}: {} grazing normal(s) had their gradients clamped", a.input.display(), g.clamped);
    }
    let solver = match a.solver {
        SolverArg::Auto if n.is_fully_valid() => SolverArg::Frankot,
        SolverArg::Auto => SolverArg::Poisson,
        s => s,
    };
    let opts = PoissonOptions {
        tolerance: a.tol,
        max_iterations: a.max_iter,
    };
    let depth = match solver {
        SolverArg::Frankot => integrate_frankot(&g)?,
        _ => integrate_poisson(&g, &opts)?,
    };
    io::save_depth(&depth, &a.depth_out)?;

    let mut r = Report::new("integrate");
    r.param("solver", if solver == SolverArg::Frankot { "frankot" } else { "poisson" });
    if solver == SolverArg::Poisson {
        r.param_f64("tol", a.tol).param("max_iter", a.max_iter);
    }
    dims(&mut r, n.width(), n.height());
    r.result("clamped", g.clamped);
    if let Some(obj) = &a.obj_out {
        let mesh = depth_to_mesh(&depth, a.scale);
        io::save_obj(&mesh, obj)?;
        r.param_f64("scale", a.scale);
        r.result("vertices", mesh.vertices.len()).result("faces", mesh.faces.len());
    }
    Ok(r)
}

fn evaluate_cmd(a: &EvaluateArgs) -> Result<Report> {
    let x = io::load(&a.a)?;
    let y = io::load(&a.b)?;
    let mut r = Report::new("evaluate");
    let metric = match a.metric {
        MetricArg::Mae => "mae",
        MetricArg::Ssim => "ssim",
        MetricArg::Rotsim => "rotsim",
        MetricArg::All => "all",
    };
    r.param("metric", metric);
    let all = a.metric == MetricArg::All;
    if all || a.metric == MetricArg::Mae {
        r.result_f64("mae_deg", mae(&x, &y)?);
    }
    if all || a.metric == MetricArg::Ssim {
        let s = ssim(&x, &y)?;
        r.result_f64("ssim", s.value)
            .result_f64("ssim_x", s.per_channel[0])
            .result_f64("ssim_y", s.per_channel[1])
            .result_f64("ssim_z", s.per_channel[2])
            .result("n_pixels", s.n_pixels);
    }
    if all || a.metric == MetricArg::Rotsim {
        let k = Kernel::gaussian_default(a.half_width)?;
        kernel_params(&mut r, &k);
        for (prefix, n) in [("a", &x), ("b", &y)] {
            let m = rotation_similarity(&shape_component(n, &k)?, a.half_width)?.mean;
            r.result_f64(&format!("{prefix}_theta_bar_deg"), m.theta_bar_deg)
                .result_f64(&format!("{prefix}_l1"), m.l1)
                .result_f64(&format!("{prefix}_l2"), m.l2)
                .result_f64(&format!("{prefix}_linf"), m.linf);
        }
    }
    Ok(r)
}
