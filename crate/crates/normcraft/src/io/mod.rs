//! Reading and writing normal maps, masks, depth maps and meshes.
//!
//! The format is chosen by extension: `.nrm` for the binary float format,
//! `.png` for 16-bit RGB. Depth maps go to `.pfm` or `.csv`, meshes to `.obj`.

pub mod depth;
pub mod nrm;
pub mod png16;

use std::fs;
use std::path::Path;

use normcraft_core::integrate::{DepthMap, Mesh};
use normcraft_core::NormalMap;

use crate::error::{Error, Result};

pub use nrm::Precision;

/// On-disk normal-map format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Nrm,
    Png,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Format> {
        match extension(path).as_deref() {
            Some("nrm") => Ok(Format::Nrm),
            Some("png") => Ok(Format::Png),
            _ => Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                expected: ".nrm or .png",
            }),
        }
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads a normal map, warning once if stored vectors were noticeably off
/// unit length.
pub fn load(path: &Path) -> Result<NormalMap> {
    let bytes = read(path)?;
    let (map, off_unit) = match Format::from_path(path)? {
        Format::Nrm => nrm::decode(&bytes)
            .map(|d| (d.map, d.off_unit))
            .map_err(|m| Error::parse(path, m))?,
        Format::Png => png16::decode(&bytes).map_err(|m| Error::parse(path, m))?,
    };
    if off_unit > 0 {
        log::warn!(
            "{}: {off_unit} pixel(s) deviated from unit length by more than {} and were renormalized",
            path.display(),
            nrm::UNIT_WARNING
        );
    }
    Ok(map)
}

/// Saves a normal map. `precision` only affects `.nrm` output.
pub fn save(map: &NormalMap, path: &Path, precision: Precision) -> Result<()> {
    let bytes = match Format::from_path(path)? {
        Format::Nrm => nrm::encode(map, precision),
        Format::Png => png16::encode(map).map_err(|m| Error::parse(path, m))?,
    };
    write(path, &bytes)
}

/// Loads a region mask of the given dimensions. PNG masks select non-black
/// pixels of any colour type; `.nrm` masks select valid pixels.
pub fn load_mask(path: &Path, dims: (usize, usize)) -> Result<Vec<bool>> {
    let bytes = read(path)?;
    let (w, h, mask) = match extension(path).as_deref() {
        Some("nrm") => {
            let d = nrm::decode(&bytes).map_err(|m| Error::parse(path, m))?;
            (d.map.width(), d.map.height(), d.map.mask().to_vec())
        }
        Some("png") => png16::decode_mask(&bytes).map_err(|m| Error::parse(path, m))?,
        _ => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                expected: ".png or .nrm",
            })
        }
    };
    if (w, h) != dims {
        return Err(normcraft_core::Error::DimensionMismatch {
            expected: dims,
            found: (w, h),
        }
        .into());
    }
    Ok(mask)
}

/// Writes a depth map as `.pfm` or `.csv`.
pub fn save_depth(d: &DepthMap, path: &Path) -> Result<()> {
    let bytes = match extension(path).as_deref() {
        Some("pfm") => depth::encode_pfm(d),
        Some("csv") => depth::encode_csv(d).into_bytes(),
        _ => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                expected: ".pfm or .csv",
            })
        }
    };
    write(path, &bytes)
}

pub fn save_obj(mesh: &Mesh, path: &Path) -> Result<()> {
    let mut s = String::new();
    mesh.write_obj(&mut s).expect("writing to a String cannot fail");
    write(path, s.as_bytes())
}
