use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::integrate::DepthMap;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Pixel coordinates are always reported as `(row, col)`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rotation to +z is singular for a normal pointing along -z{}", fmt_pixel(.pixel))]
    PoleSingularity { pixel: Option<(usize, usize)> },

    #[error("{} pixel(s) have near-zero length, first at {:?}", .pixels.len(), .pixels.first())]
    DegeneratePixel { pixels: Vec<(usize, usize)> },

    #[error("valid pixel ({row}, {col}) has no valid neighbours under the kernel footprint")]
    EmptyNeighborhood { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?} (width, height)")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("masks of the two maps differ")]
    MaskMismatch,

    #[error("region is not contained in the target mask")]
    RegionOutOfBounds,

    #[error("compared maps have no valid pixels in common")]
    EmptyOverlap,

    #[error("swatch of {width}x{height} is smaller than the {window}x{window} window")]
    SwatchTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },

    #[error("no synthesis candidate for pixel ({row}, {col})")]
    NonConvergence { row: usize, col: usize },

    #[error("spectral integration needs a fully valid mask")]
    MaskNotFull,

    #[error("conjugate gradient stopped after {iterations} iterations at relative residual {residual:e}")]
    ConvergenceFailure {
        residual: f64,
        iterations: usize,
        best: Box<DepthMap>,
    },

    #[error("detail enhancer failed: {0}")]
    EnhancerFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid normal map: {0}")]
    InvalidMap(String),
}

fn fmt_pixel(pixel: &Option<(usize, usize)>) -> String {
    match pixel {
        Some((r, c)) => alloc::format!(" at pixel ({r}, {c})"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches pixel coordinates to a [`Error::PoleSingularity`] raised by a
    /// single-vector operation.
    pub(crate) fn at_pixel(self, row: usize, col: usize) -> Self {
        match self {
            Error::PoleSingularity { pixel: None } => Error::PoleSingularity {
                pixel: Some((row, col)),
            },
            other => other,
        }
    }

    /// Errors caused by the numbers rather than the shape of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::PoleSingularity { .. }
                | Error::DegeneratePixel { .. }
                | Error::EmptyNeighborhood { .. }
                | Error::NonConvergence { .. }
                | Error::ConvergenceFailure { .. }
        )
    }
}
