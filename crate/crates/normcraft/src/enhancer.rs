//! Detail enhancement by an external program.
//!
//! The program is invoked as `cmd <in.nrm> <out.nrm> <factor>`. It reads the
//! detail component from `in.nrm` and must write a map of `factor` times the
//! input size to `out.nrm`, then exit with status 0.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use normcraft_core::superres::DetailEnhancer;
use normcraft_core::{Error as CoreError, NormalMap, Result as CoreResult};

use crate::io::{nrm, Precision};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);
const POLL: Duration = Duration::from_millis(10);

#[derive(Debug, Clone)]
pub struct ExternalEnhancer {
    pub program: PathBuf,
    pub timeout: Duration,
}

impl ExternalEnhancer {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        ExternalEnhancer {
            program: program.into(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

fn failed(message: impl Into<String>) -> CoreError {
    CoreError::EnhancerFailed(message.into())
}

impl DetailEnhancer for ExternalEnhancer {
    fn enhance(&self, detail: &NormalMap, factor: usize) -> CoreResult<NormalMap> {
        run_external_enhancer(&self.program, detail, factor, self.timeout)
    }
}

/// Runs `program` on `detail` in a scratch directory and reads its output.
pub fn run_external_enhancer(
    program: &Path,
    detail: &NormalMap,
    factor: usize,
    timeout: Duration,
) -> CoreResult<NormalMap> {
    let dir = tempfile::tempdir().map_err(|e| failed(format!("cannot create scratch directory: {e}")))?;
    let input = dir.path().join("in.nrm");
    let output = dir.path().join("out.nrm");
    std::fs::write(&input, nrm::encode(detail, Precision::F32))
        .map_err(|e| failed(format!("cannot write {}: {e}", input.display())))?;

    let mut child = Command::new(program)
        .arg(&input)
        .arg(&output)
        .arg(factor.to_string())
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| failed(format!("cannot run {}: {e}", program.display())))?;

    // Drain stderr on its own thread so a chatty child cannot block on a
    // full pipe while we poll.
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(failed(format!(
                    "{} timed out after {:.1} s",
                    program.display(),
                    timeout.as_secs_f64()
                )));
            }
            Ok(None) => thread::sleep(POLL),
            Err(e) => return Err(failed(format!("waiting for {}: {e}", program.display()))),
        }
    };
    let stderr = reader.join().unwrap_or_default();
    if !status.success() {
        return Err(failed(format!(
            "{} exited with {status}: {}",
            program.display(),
            stderr.trim()
        )));
    }
    let bytes = std::fs::read(&output)
        .map_err(|e| failed(format!("no output from {}: {e}", program.display())))?;
    let decoded = nrm::decode(&bytes).map_err(|m| failed(format!("bad output from {}: {m}", program.display())))?;
    Ok(decoded.map)
}
