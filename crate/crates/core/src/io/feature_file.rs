//! Binary feature-tensor files.
//!
//! Layout: magic `MFPF`, little-endian `u32` version (currently 1), then
//! `u32` channels, height, width, then `channels * height * width`
//! little-endian `f64` values, channel-major then row-major. Round trips
//! are bit-exact.

use crate::classify::FeatureTensor;
use crate::error::{Error, Result};
use std::path::Path;

pub const FEATURE_MAGIC: [u8; 4] = *b"MFPF";
pub const FEATURE_VERSION: u32 = 1;

/// Serialize a tensor to bytes.
pub fn encode_features(t: &FeatureTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + t.data().len() * 8);
    out.extend_from_slice(&FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
    for dim in [t.channels(), t.height(), t.width()] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parse bytes produced by [`encode_features`].
pub fn decode_features(bytes: &[u8]) -> Result<FeatureTensor> {
    if bytes.len() < 20 {
        return Err(Error::Format("feature file shorter than its header".into()));
    }
    if bytes[0..4] != FEATURE_MAGIC {
        return Err(Error::Format("bad feature-file magic".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != FEATURE_VERSION {
        return Err(Error::Format(format!(
            "feature-file version {version}, expected {FEATURE_VERSION}"
        )));
    }
    let (c, h, w) = (word(8) as usize, word(12) as usize, word(16) as usize);
    let need = c
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .ok_or_else(|| Error::Format("feature-file dimensions overflow".into()))?;
    let payload = &bytes[20..];
    if payload.len() != need * 8 {
        return Err(Error::Format(format!(
            "feature-file payload {} bytes, dimensions require {}",
            payload.len(),
            need * 8
        )));
    }
    let data: Vec<f64> = payload
        .chunks_exact(8)
        .map(|ch| f64::from_le_bytes(ch.try_into().unwrap()))
        .collect();
    FeatureTensor::new(c, h, w, data)
}

/// Write a tensor to disk atomically (temp file, then rename).
pub fn write_features(path: &Path, t: &FeatureTensor) -> Result<()> {
    crate::io::write_atomic(path, &encode_features(t))
}

pub fn read_features(path: &Path) -> Result<FeatureTensor> {
    decode_features(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureTensor {
        let data: Vec<f64> = (0..2 * 3 * 4).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        FeatureTensor::new(2, 3, 4, data).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let t = sample();
        let back = decode_features(&encode_features(&t)).unwrap();
        assert_eq!(t, back);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mff");
        write_features(&path, &t).unwrap();
        assert_eq!(read_features(&path).unwrap(), t);
    }

    #[test]
    fn bad_magic_and_version_rejected() {
        let mut bytes = encode_features(&sample());
        bytes[0] = b'X';
        assert!(matches!(decode_features(&bytes), Err(Error::Format(_))));

        let mut bytes = encode_features(&sample());
        bytes[4] = 9;
        assert!(matches!(decode_features(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn payload_length_mismatch_rejected() {
        let mut bytes = encode_features(&sample());
        bytes.truncate(bytes.len() - 8);
        assert!(matches!(decode_features(&bytes), Err(Error::Format(_))));
        // dimension header inconsistent with payload
        let mut bytes = encode_features(&sample());
        bytes[8..12].copy_from_slice(&5u32.to_le_bytes());
        assert!(decode_features(&bytes).is_err());
    }
}
