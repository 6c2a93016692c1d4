//! Dataset and file I/O: image decoding, preprocessing, manifests, and
//! the binary feature-tensor format.

mod feature_file;
mod image_file;
mod manifest;
mod preprocess;

pub use feature_file::{
    decode_features, encode_features, read_features, write_features, FEATURE_MAGIC,
    FEATURE_VERSION,
};
pub use image_file::{decode_image, load_image, write_pgm};
pub use manifest::{filter_classes, split, split_indices, DatasetManifest, ManifestEntry};
pub use preprocess::{pad_to_square, resize};

use crate::error::Result;
use std::path::Path;

/// Preprocess one raw image: center-pad to square, then resize.
pub fn preprocess(img: &crate::mat::Image<f64>, target: usize) -> Result<crate::mat::Image<f64>> {
    resize(&pad_to_square(img), target)
}

/// Write bytes through a sibling temp file and rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "tmp.{}",
        std::process::id()
    ));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
