use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use normcraft::core::superres::{upsample, DetailEnhancer, UpsampleSpec};
use normcraft::core::decompose::Kernel;
use normcraft::core::{synthetic, Error};
use normcraft::enhancer::{run_external_enhancer, ExternalEnhancer};

fn nearest() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_normcraft-nearest-enhancer"))
}

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

#[test]
fn factor_one_is_the_identity() {
    let m = synthetic::bumps(12, 9, 0.5, 6.0);
    let out = run_external_enhancer(&nearest(), &m, 1, Duration::from_secs(30)).unwrap();
    // The scratch file is single precision.
    for (a, b) in out.data().iter().zip(m.data()) {
        assert!((*a - *b).norm() < 1e-6);
    }
}

#[test]
fn factor_two_replicates_blocks() {
    let m = synthetic::bumps(6, 5, 0.5, 6.0);
    let out = ExternalEnhancer::new(nearest()).enhance(&m, 2).unwrap();
    assert_eq!(out.dims(), (12, 10));
    for r in 0..10 {
        for c in 0..12 {
            assert!((out.at(r, c) - m.at(r / 2, c / 2)).norm() < 1e-6);
        }
    }
}

#[test]
fn pipeline_with_external_enhancer() {
    let m = synthetic::bumpy_sphere(32, 32, 0.5, 6.0);
    let up = upsample(
        &m,
        &UpsampleSpec::new(4).unwrap(),
        &Kernel::default(),
        &ExternalEnhancer::new(nearest()),
    )
    .unwrap();
    assert_eq!(up.dims(), (128, 128));
}

#[test]
fn missing_program_fails() {
    let e = ExternalEnhancer::new("/nonexistent/enhancer")
        .enhance(&synthetic::bumps(4, 4, 0.5, 6.0), 2)
        .unwrap_err();
    assert!(matches!(e, Error::EnhancerFailed(_)));
}

#[test]
fn nonzero_exit_reports_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let prog = script(dir.path(), "fail.sh", "echo broken model >&2\nexit 4");
    let e = ExternalEnhancer::new(prog).enhance(&synthetic::bumps(4, 4, 0.5, 6.0), 2).unwrap_err();
    match e {
        Error::EnhancerFailed(msg) => assert!(msg.contains("broken model"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn wrong_output_size_fails() {
    let dir = tempfile::tempdir().unwrap();
    // Copies the input unchanged, ignoring the factor.
    let prog = script(dir.path(), "copy.sh", "cp \"$1\" \"$2\"");
    let e = upsample(
        &synthetic::bumps(8, 8, 0.5, 6.0),
        &UpsampleSpec::new(2).unwrap(),
        &Kernel::default(),
        &ExternalEnhancer::new(prog),
    )
    .unwrap_err();
    assert!(matches!(e, Error::EnhancerFailed(_)));
}

#[test]
fn missing_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let prog = script(dir.path(), "noop.sh", "exit 0");
    let e = ExternalEnhancer::new(prog).enhance(&synthetic::bumps(4, 4, 0.5, 6.0), 2).unwrap_err();
    assert!(matches!(e, Error::EnhancerFailed(_)));
}

#[test]
fn slow_program_is_killed() {
    let dir = tempfile::tempdir().unwrap();
    let prog = script(dir.path(), "slow.sh", "exec sleep 30");
    let start = Instant::now();
    let e = ExternalEnhancer::new(prog)
        .with_timeout(Duration::from_millis(200))
        .enhance(&synthetic::bumps(4, 4, 0.5, 6.0), 2)
        .unwrap_err();
    assert!(matches!(e, Error::EnhancerFailed(ref m) if m.contains("timed out")));
    assert!(start.elapsed() < Duration::from_secs(10));
}
