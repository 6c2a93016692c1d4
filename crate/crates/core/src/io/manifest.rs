//! Dataset manifests: `path<TAB>label` lines, class filtering, seeded
//! splits.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: String,
}

/// Ordered list of (path, label) pairs with unique paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if e.label.is_empty() {
                return Err(Error::Dataset(format!(
                    "empty label for {}",
                    e.path.display()
                )));
            }
            if !seen.insert(e.path.clone()) {
                return Err(Error::Dataset(format!(
                    "duplicate path {}",
                    e.path.display()
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Parse manifest text: one `path<TAB>label` per line, `#` comments.
    /// Relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (path, label) = line.split_once('\t').ok_or_else(|| {
                Error::Format(format!("manifest line {}: expected path<TAB>label", lineno + 1))
            })?;
            let p = PathBuf::from(path);
            let p = if p.is_relative() { base.join(p) } else { p };
            entries.push(ManifestEntry {
                path: p,
                label: label.trim().to_string(),
            });
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-class counts, label-sorted.
    pub fn class_histogram(&self) -> BTreeMap<String, usize> {
        let mut hist = BTreeMap::new();
        for e in &self.entries {
            *hist.entry(e.label.clone()).or_insert(0) += 1;
        }
        hist
    }
}

/// Keep exactly the classes whose counts lie in `[min_count, max_count]`.
pub fn filter_classes(
    manifest: &DatasetManifest,
    min_count: usize,
    max_count: usize,
) -> Result<DatasetManifest> {
    if min_count > max_count {
        return Err(Error::InvalidConfig(format!(
            "min_count {min_count} exceeds max_count {max_count}"
        )));
    }
    let hist = manifest.class_histogram();
    let keep: std::collections::BTreeSet<&String> = hist
        .iter()
        .filter(|(_, &c)| c >= min_count && c <= max_count)
        .map(|(l, _)| l)
        .collect();
    let entries: Vec<ManifestEntry> = manifest
        .entries()
        .iter()
        .filter(|e| keep.contains(&e.label))
        .cloned()
        .collect();
    if entries.is_empty() {
        return Err(Error::Dataset(format!(
            "no class has between {min_count} and {max_count} instances"
        )));
    }
    DatasetManifest::new(entries)
}

/// Seeded disjoint exhaustive split of `0..n` into (train, test) index
/// sets. The test set takes `round(n * test_fraction)` items, rounding
/// half up.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let test_count = (n as f64 * test_fraction + 0.5).floor() as usize;
    if test_count == 0 || test_count >= n {
        return Err(Error::Dataset(format!(
            "degenerate split: {test_count} of {n} items in the test set"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = order[..test_count].to_vec();
    let train = order[test_count..].to_vec();
    Ok((train, test))
}

/// Seeded uniform (train, test) manifest split.
pub fn split(
    manifest: &DatasetManifest,
    test_fraction: f64,
    seed: u64,
) -> Result<(DatasetManifest, DatasetManifest)> {
    let (train_idx, test_idx) = split_indices(manifest.len(), test_fraction, seed)?;
    let pick = |idx: &[usize]| {
        DatasetManifest::new(idx.iter().map(|&i| manifest.entries()[i].clone()).collect())
    };
    Ok((pick(&train_idx)?, pick(&test_idx)?))
}
