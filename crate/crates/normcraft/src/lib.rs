//! File formats, the external detail-enhancer protocol and the command-line
//! front end for [`normcraft_core`].
//!
//! * [`io`] – `.nrm` (lossless) and 16-bit PNG normal maps, region masks,
//!   depth maps as PFM or CSV, meshes as OBJ.
//! * [`enhancer`] – runs an external program as a [`DetailEnhancer`].
//! * [`cli`] – the `normcraft` command.
//!
//! [`DetailEnhancer`]: normcraft_core::superres::DetailEnhancer

pub mod cli;
pub mod enhancer;
mod error;
pub mod io;

pub use error::{Error, Result};
pub use normcraft_core as core;
