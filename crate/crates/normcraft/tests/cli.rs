use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use normcraft::core::decompose::{decompose, Kernel};
use normcraft::core::metrics::{compare, mae};
use normcraft::core::transfer::{transfer, TransferRequest};
use normcraft::core::{synthetic, NormalMap, UnitVec3, Vec3};
use normcraft::io::{self, nrm, Precision};

fn normcraft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normcraft"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Fixture { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn write(&self, name: &str, m: &NormalMap) -> PathBuf {
        let path = self.path(name);
        io::save(m, &path, Precision::F64).unwrap();
        path
    }
}

#[test]
fn decompose_transfer_evaluate_golden() {
    let f = Fixture::new();
    let n = synthetic::bumpy_sphere(64, 64, 0.5, 6.0);
    let input = f.write("in.nrm", &n);
    let (shape, detail, out) = (f.path("shape.nrm"), f.path("detail.nrm"), f.path("out.nrm"));
    let report = f.path("report.json");

    let o = normcraft(&["decompose", p(&input), "--w", "5", "--kernel", "gauss", "-o-shape", p(&shape), "-o-detail", p(&detail)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "w"), "5");
    assert_eq!(value(&text, "kernel"), "gauss");
    assert_eq!(value(&text, "sigma"), "2.500000");

    // The CLI writes exactly what the library computes.
    let k = Kernel::default();
    let parts = decompose(&io::load(&input).unwrap(), &k).unwrap();
    assert_eq!(std::fs::read(&shape).unwrap(), nrm::encode(&parts.shape, Precision::F64));
    assert_eq!(std::fs::read(&detail).unwrap(), nrm::encode(&parts.detail, Precision::F64));

    let o = normcraft(&["transfer", "--detail", p(&detail), "--shape", p(&shape), "-o", p(&out), "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // Same inputs as the CLI saw: the files, renormalized on load.
    let (detail_in, shape_in) = (io::load(&detail).unwrap(), io::load(&shape).unwrap());
    let lib = transfer(&TransferRequest::new(&detail_in, &shape_in)).unwrap();
    assert_eq!(std::fs::read(&out).unwrap(), nrm::encode(&lib.output, Precision::F64));
    let text = stdout(&o);
    assert_eq!(value(&text, "detail_ssim"), format!("{:.6}", lib.detail_ssim));
    assert_eq!(value(&text, "shape_mae_deg"), format!("{:.6}", lib.shape_mae_deg));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["results"]["detail_ssim"].as_f64().unwrap(), lib.detail_ssim);
    assert_eq!(json["parameters"]["w"], 5);
    assert_eq!(json["parameters"]["kernel"], "gauss");

    // Recomposition reproduces the input.
    let back = io::load(&out).unwrap();
    assert!(mae(&back, &n).unwrap() <= 1e-6);

    let o = normcraft(&["evaluate", p(&out), p(&input), "--metric", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lib = compare(&back, &n).unwrap();
    assert_eq!(value(&text, "mae_deg"), format!("{:.6}", lib.mae_deg));
    assert_eq!(value(&text, "ssim"), format!("{:.6}", lib.ssim));
    assert_eq!(value(&text, "ssim"), "1.000000");
}

#[test]
fn evaluate_self_is_perfect() {
    let f = Fixture::new();
    let x = f.write("x.png", &synthetic::sphere_cap(40, 40, 15.0));
    let o = normcraft(&["evaluate", p(&x), p(&x)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("mae_deg=0.000000\n"));
    assert!(text.contains("ssim=1.000000\n"));
    assert_eq!(value(&text, "a_theta_bar_deg"), value(&text, "b_theta_bar_deg"));
}

#[test]
fn upsample_four_times() {
    let f = Fixture::new();
    let x = f.write("x.nrm", &synthetic::bumpy_sphere(64, 64, 1.0, 24.0));
    let out = f.path("up.nrm");
    let o = normcraft(&["upsample", p(&x), "--factor", "4", "--w", "5", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(io::load(&out).unwrap().dims(), (256, 256));
    assert_eq!(value(&stdout(&o), "enhancer"), "bicubic");

    let enhancer = env!("CARGO_BIN_EXE_normcraft-nearest-enhancer");
    let o = normcraft(&["upsample", p(&x), "--factor", "2", "--detail-cmd", enhancer, "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(io::load(&out).unwrap().dims(), (128, 128));
}

#[test]
fn enhancer_failure_is_a_data_error() {
    let f = Fixture::new();
    let x = f.write("x.nrm", &synthetic::bumps(16, 16, 0.5, 6.0));
    let o = normcraft(&["upsample", p(&x), "--factor", "2", "--detail-cmd", "/nonexistent/prog", "-o", p(&f.path("o.nrm"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn synthesize_is_deterministic() {
    let f = Fixture::new();
    let sw = f.write("sw.nrm", &synthetic::bumps(24, 24, 0.5, 6.0));
    let (a, b) = (f.path("a.nrm"), f.path("b.nrm"));
    for out in [&a, &b] {
        let o = normcraft(&["synthesize", "--swatch", p(&sw), "--width", "32", "--height", "28", "--window", "7", "--seed", "9", "-o", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert_eq!(value(&text, "window"), "7");
        assert_eq!(value(&text, "tol"), "0.100000");
        assert_eq!(value(&text, "seed"), "9");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(io::load(&a).unwrap().dims(), (32, 28));
}

#[test]
fn synthesize_onto_a_shape() {
    let f = Fixture::new();
    let sw = f.write("sw.nrm", &synthetic::bumps(24, 24, 0.5, 6.0));
    let shape = f.write("shape.nrm", &synthetic::full_frame_sphere(40, 40));
    let out = f.path("o.nrm");
    let o = normcraft(&["synthesize", "--swatch", p(&sw), "--width", "1", "--height", "1", "--window", "5", "--onto", p(&shape), "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(io::load(&out).unwrap().dims(), (40, 40));
    assert!(value(&stdout(&o), "shape_mae_deg").parse::<f64>().unwrap() < 5.0);
}

#[test]
fn local_transfer_with_region_mask() {
    let f = Fixture::new();
    let detail = decompose(&synthetic::bumps(48, 48, 0.5, 6.0), &Kernel::default()).unwrap().detail;
    let d = f.write("d.nrm", &detail);
    let shape = f.write("s.nrm", &synthetic::full_frame_sphere(48, 48));
    let region = f.write(
        "r.nrm",
        &NormalMap::from_fn(48, 48, |r, c| ((16..32).contains(&r) && (16..32).contains(&c)).then_some(Vec3::Z)).unwrap(),
    );
    let out = f.path("o.nrm");
    let o = normcraft(&["transfer", "--detail", p(&d), "--shape", p(&shape), "--region", p(&region), "--local", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "n_pixels"), "256");
    assert_eq!(value(&text, "feather"), "10");
    assert_eq!(value(&text, "local"), "true");
}

#[test]
fn integrate_writes_depth_and_mesh() {
    let f = Fixture::new();
    let x = f.write("cap.nrm", &synthetic::sphere_cap(24, 24, 10.0));
    let (depth, obj) = (f.path("z.csv"), f.path("m.obj"));
    let o = normcraft(&["integrate", p(&x), "-o-depth", p(&depth), "-o-obj", p(&obj), "--scale", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(value(&text, "solver"), "poisson");
    let mesh = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(mesh.lines().filter(|l| l.starts_with("f ")).count().to_string(), value(&text, "faces"));
    assert_eq!(std::fs::read_to_string(&depth).unwrap().lines().count(), 24);

    let plane = f.write("plane.nrm", &NormalMap::constant(16, 16, UnitVec3::Z));
    let pfm = f.path("z.pfm");
    let o = normcraft(&["integrate", p(&plane), "--o-depth", p(&pfm)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "solver"), "frankot");
    assert!(std::fs::read(&pfm).unwrap().starts_with(b"Pf\n16 16\n-1.0\n"));

    let o = normcraft(&["integrate", p(&x), "--solver", "frankot", "-o-depth", p(&pfm)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let f = Fixture::new();
    let good = f.write("g.nrm", &NormalMap::constant(16, 16, UnitVec3::Z));

    // Usage errors.
    assert_eq!(normcraft(&[]).status.code(), Some(1));
    assert_eq!(normcraft(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(normcraft(&["evaluate", p(&good)]).status.code(), Some(1));
    assert_eq!(normcraft(&["evaluate", p(&good), p(&good), "--metric", "psnr"]).status.code(), Some(1));
    assert_eq!(normcraft(&["--help"]).status.code(), Some(0));
    assert_eq!(normcraft(&["--version"]).status.code(), Some(0));

    // Data errors.
    let truncated = f.path("t.nrm");
    let bytes = std::fs::read(&good).unwrap();
    std::fs::write(&truncated, &bytes[..bytes.len() - 3]).unwrap();
    let o = normcraft(&["evaluate", p(&truncated), p(&good)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(normcraft(&["evaluate", p(&f.path("absent.nrm")), p(&good)]).status.code(), Some(2));
    std::fs::write(f.path("junk.nrm"), b"not a normal map at all").unwrap();
    assert_eq!(normcraft(&["evaluate", p(&f.path("junk.nrm")), p(&good)]).status.code(), Some(2));
    let small = f.write("s.nrm", &NormalMap::constant(8, 8, UnitVec3::Z));
    assert_eq!(normcraft(&["evaluate", p(&small), p(&good)]).status.code(), Some(2));
    let out = f.path("o.nrm");
    assert_eq!(normcraft(&["upsample", p(&good), "--factor", "5", "-o", p(&out)]).status.code(), Some(2));
    assert_eq!(
        normcraft(&["decompose", p(&good), "-o-shape", p(&f.path("a.txt")), "-o-detail", p(&out)]).status.code(),
        Some(2)
    );

    // Numeric failure: every shape normal points along -z.
    let down = f.write("down.nrm", &NormalMap::constant(16, 16, UnitVec3::normalize(-Vec3::Z).unwrap()));
    let o = normcraft(&["decompose", p(&down), "-o-shape", p(&f.path("s2.nrm")), "-o-detail", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thread_cap_is_honoured() {
    let f = Fixture::new();
    let x = f.write("x.nrm", &synthetic::bumps(32, 32, 0.5, 6.0));
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_normcraft"))
            .env("NORMCRAFT_THREADS", threads)
            .args(["evaluate", p(&x), p(&x)])
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(0));
}
