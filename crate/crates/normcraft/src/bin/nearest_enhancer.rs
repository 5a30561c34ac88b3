//! Reference detail enhancer: nearest-neighbour replication.
//!
//! Usage: `normcraft-nearest-enhancer <in.nrm> <out.nrm> <factor>`

use std::process::ExitCode;

use normcraft::core::resample::upsample_nearest;
use normcraft::io::nrm;

fn run(args: &[String]) -> Result<(), String> {
    let [input, output, factor] = args else {
        return Err("usage: normcraft-nearest-enhancer <in.nrm> <out.nrm> <factor>".into());
    };
    let factor: usize = factor.parse().map_err(|_| format!("bad factor {factor:?}"))?;
    if factor == 0 {
        return Err("factor must be positive".into());
    }
    let bytes = std::fs::read(input).map_err(|e| format!("{input}: {e}"))?;
    let decoded = nrm::decode(&bytes).map_err(|e| format!("{input}: {e}"))?;
    let up = if factor == 1 {
        decoded.map
    } else {
        upsample_nearest(&decoded.map, factor).map_err(|e| e.to_string())?
    };
    std::fs::write(output, nrm::encode(&up, decoded.precision)).map_err(|e| format!("{output}: {e}"))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
