//! Grayscale image loading: binary PGM (P5) and 8-bit PNG.

use crate::error::{Error, Result};
use crate::mat::Image;
use std::path::Path;

/// Load an 8-bit grayscale image, scaled to `[0, 1]`.
///
/// Accepts binary PGM (P5, maxval <= 255) and 8-bit grayscale or RGB PNG;
/// RGB collapses to the unweighted channel mean.
pub fn load_image(path: &Path) -> Result<Image<f64>> {
    let bytes = std::fs::read(path)?;
    decode_image(&bytes)
}

/// As [`load_image`], from bytes already in memory.
pub fn decode_image(bytes: &[u8]) -> Result<Image<f64>> {
    if bytes.starts_with(b"P5") {
        return decode_pgm(bytes);
    }
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        return decode_png(bytes);
    }
    Err(Error::Format(
        "unsupported image format (expected binary PGM P5 or PNG)".into(),
    ))
}

fn decode_pgm(bytes: &[u8]) -> Result<Image<f64>> {
    let mut at = 2usize; // past "P5"
    let width = pgm_number(bytes, &mut at)?;
    let height = pgm_number(bytes, &mut at)?;
    let maxval = pgm_number(bytes, &mut at)?;
    if width == 0 || height == 0 {
        return Err(Error::Format("PGM dimensions must be positive".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Format(format!(
            "PGM maxval {maxval} out of 8-bit range"
        )));
    }
    // exactly one whitespace byte separates the header from the payload
    if at >= bytes.len() || !bytes[at].is_ascii_whitespace() {
        return Err(Error::Format("missing PGM header terminator".into()));
    }
    at += 1;
    let need = width * height;
    let payload = &bytes[at..];
    if payload.len() < need {
        return Err(Error::Format(format!(
            "truncated PGM payload: {} of {} bytes",
            payload.len(),
            need
        )));
    }
    let scale = maxval as f64;
    let data: Vec<f64> = payload[..need].iter().map(|&b| b as f64 / scale).collect();
    Image::new(height, width, data)
}

/// Parse the next decimal token, skipping whitespace and `#` comments.
fn pgm_number(bytes: &[u8], at: &mut usize) -> Result<usize> {
    loop {
        while *at < bytes.len() && bytes[*at].is_ascii_whitespace() {
            *at += 1;
        }
        if *at < bytes.len() && bytes[*at] == b'#' {
            while *at < bytes.len() && bytes[*at] != b'\n' {
                *at += 1;
            }
            continue;
        }
        break;
    }
    let start = *at;
    while *at < bytes.len() && bytes[*at].is_ascii_digit() {
        *at += 1;
    }
    if *at == start {
        return Err(Error::Format("corrupt PGM header".into()));
    }
    std::str::from_utf8(&bytes[start..*at])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("corrupt PGM header".into()))
}

fn decode_png(bytes: &[u8]) -> Result<Image<f64>> {
    let decoded = image::load_from_memory(bytes)
        .map_err(|e| Error::Format(format!("PNG decode failed: {e}")))?;
    match decoded {
        image::DynamicImage::ImageLuma8(img) => {
            let (w, h) = img.dimensions();
            let data: Vec<f64> = img.into_raw().iter().map(|&b| b as f64 / 255.0).collect();
            Image::new(h as usize, w as usize, data)
        }
        image::DynamicImage::ImageRgb8(img) => {
            let (w, h) = img.dimensions();
            let raw = img.into_raw();
            let data: Vec<f64> = raw
                .chunks_exact(3)
                .map(|px| (px[0] as f64 + px[1] as f64 + px[2] as f64) / (3.0 * 255.0))
                .collect();
            Image::new(h as usize, w as usize, data)
        }
        other => Err(Error::Format(format!(
            "unsupported PNG pixel format {:?} (need 8-bit grayscale or RGB)",
            other.color()
        ))),
    }
}

/// Write `[0, 1]` values as a binary PGM (P5) with maxval 255.
pub fn write_pgm(path: &Path, img: &Image<f64>) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(
        img.data()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    crate::io::write_atomic(path, &out)
}
