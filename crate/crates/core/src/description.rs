//! The JSON description of a system and the bundled gallery.
//!
//! ```json
//! {
//!   "format": 1,
//!   "block_sizes": [1, 1, 1],
//!   "source": [0, 1],
//!   "target": [1, 2],
//!   "block_map": [[0, 1], [1, 2]],
//!   "unitaries": [{"block": 0, "matrix": [[[1, 0]]]}],
//!   "weights": [[0], [0], [0]]
//! }
//! ```
//!
//! Block indices start at 0. Complex entries are `[re, im]` pairs, and
//! unitaries default to the identity.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{FdAlgebra, PartialAutomorphism};
use crate::error::{Error, Result};
use crate::linalg::{Mat, C64};
use crate::structure::CircleAction;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryEntry {
    pub block: usize,
    /// Row-major, each entry `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub format: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub block_sizes: Vec<usize>,
    /// Blocks of `I`.
    #[serde(default)]
    pub source: Vec<usize>,
    /// Blocks of `J`.
    #[serde(default)]
    pub target: Vec<usize>,
    #[serde(default)]
    pub block_map: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unitaries: Vec<UnitaryEntry>,
    /// Circle-action weights per block, for the structure command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<i64>>>,
    /// Run the structure command on the dual action of the realized algebra.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dual_action: bool,
}

impl SystemDescription {
    /// Parses and checks the format version; errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let d: SystemDescription = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if d.format != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format {}, expected {FORMAT_VERSION}",
                d.format
            )));
        }
        Ok(d)
    }

    /// Compact canonical JSON, used for fingerprints.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("descriptions serialize")
    }

    pub fn algebra(&self) -> Result<FdAlgebra> {
        FdAlgebra::new(self.block_sizes.clone())
    }

    /// Builds `Θ`, checking that `source` and `target` match the block map.
    pub fn to_system(&self, tol: f64) -> Result<PartialAutomorphism> {
        let algebra = self.algebra()?;
        for &b in self.source.iter().chain(&self.target) {
            algebra.check_block(b)?;
        }
        let mut map = BTreeMap::new();
        for &(i, j) in &self.block_map {
            if map.insert(i, j).is_some() {
                return Err(Error::InvalidBlockMap(format!("block {i} is mapped twice")));
            }
        }
        let keys: BTreeSet<usize> = map.keys().cloned().collect();
        let values: BTreeSet<usize> = map.values().cloned().collect();
        let source: BTreeSet<usize> = self.source.iter().cloned().collect();
        let target: BTreeSet<usize> = self.target.iter().cloned().collect();
        if keys != source {
            let diff: Vec<usize> = keys.symmetric_difference(&source).cloned().collect();
            return Err(Error::InvalidBlockMap(format!(
                "source blocks {source:?} differ from the domain {keys:?} of the block map at blocks {diff:?}"
            )));
        }
        if values != target {
            let diff: Vec<usize> = values.symmetric_difference(&target).cloned().collect();
            return Err(Error::InvalidBlockMap(format!(
                "target blocks {target:?} differ from the range {values:?} of the block map at blocks {diff:?}"
            )));
        }
        let mut unitaries = BTreeMap::new();
        for entry in &self.unitaries {
            let rows = entry.matrix.len();
            if entry.matrix.iter().any(|r| r.len() != rows) {
                return Err(Error::InvalidBlockMap(format!(
                    "unitary for block {} is not square",
                    entry.block
                )));
            }
            let m = Mat::from_fn(rows, rows, |r, c| {
                let [re, im] = entry.matrix[r][c];
                C64::new(re, im)
            });
            if unitaries.insert(entry.block, m).is_some() {
                return Err(Error::InvalidBlockMap(format!(
                    "two unitaries given for block {}",
                    entry.block
                )));
            }
        }
        PartialAutomorphism::new(algebra, map, unitaries, tol)
    }

    pub fn circle_action(&self) -> Option<Result<CircleAction>> {
        let w = self.weights.as_ref()?;
        Some(self.algebra().and_then(|a| CircleAction::new(a, w.clone())))
    }
}

/// A bundled example and the commands it is meant to pass.
#[derive(Clone, Copy, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub json: &'static str,
    pub commands: &'static [&'static str],
}

impl GalleryEntry {
    pub fn description(&self) -> SystemDescription {
        SystemDescription::parse(self.json).expect("gallery files are valid")
    }
}

macro_rules! entry {
    ($name:literal, [$($cmd:literal),*]) => {
        GalleryEntry {
            name: $name,
            json: include_str!(concat!("../gallery/", $name, ".json")),
            commands: &[$($cmd),*],
        }
    };
}

const GALLERY: &[GalleryEntry] = &[
    entry!("dual-shift-c3", ["structure"]),
    entry!("m2-theta", ["validate", "build", "pv", "toeplitz"]),
    entry!("m2-weights", ["structure"]),
    entry!("shift-c2", ["validate", "build", "pv", "toeplitz"]),
    entry!("shift-c3", ["validate", "build", "pv", "toeplitz"]),
    entry!("shift-c4", ["validate", "build", "pv"]),
    entry!("shift-c5", ["validate", "build", "pv"]),
    entry!("shift-c6", ["validate", "build", "pv"]),
    entry!("swap-c2", ["validate", "build"]),
    entry!("toeplitz-c2", ["toeplitz"]),
    entry!("trivial-weights", ["structure"]),
    entry!("twisted-m2", ["validate", "build", "pv", "toeplitz"]),
    entry!("zero-ideal", ["validate", "build", "pv", "toeplitz"]),
];

pub fn gallery() -> &'static [GalleryEntry] {
    GALLERY
}

pub fn gallery_entry(name: &str) -> Option<&'static GalleryEntry> {
    GALLERY.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ChainBound;

    #[test]
    fn every_gallery_file_loads() {
        for e in gallery() {
            let d = e.description();
            assert_eq!(d.name.as_deref(), Some(e.name));
            if d.weights.is_none() {
                d.to_system(1e-9).unwrap();
            }
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = SystemDescription::parse(r#"{"format": 1, "block_sizes": [1], "colour": 3}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn wrong_format_is_rejected() {
        assert!(SystemDescription::parse(r#"{"format": 2, "block_sizes": [1]}"#).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = SystemDescription::parse("{\n  \"format\": 1,\n  \"block_sizes\": [1,\n}").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn mismatched_source_names_blocks() {
        let text = r#"{"format": 1, "block_sizes": [1, 1, 1], "source": [0], "target": [1], "block_map": [[0, 1], [1, 2]]}"#;
        let err = SystemDescription::parse(text)
            .unwrap()
            .to_system(1e-9)
            .unwrap_err();
        assert!(err.to_string().contains("[1]"), "{err}");
    }

    #[test]
    fn non_unitary_matrix_reports_residual() {
        let text = r#"{"format": 1, "block_sizes": [1, 1], "source": [0], "target": [1], "block_map": [[0, 1]],
            "unitaries": [{"block": 0, "matrix": [[[2, 0]]]}]}"#;
        let err = SystemDescription::parse(text)
            .unwrap()
            .to_system(1e-9)
            .unwrap_err();
        assert!(matches!(err, Error::NotUnitary { block: 0, .. }));
    }

    #[test]
    fn swap_is_unbounded_and_shift_is_not() {
        let swap = gallery_entry("swap-c2")
            .unwrap()
            .description()
            .to_system(1e-9)
            .unwrap();
        assert_eq!(swap.chain_bound(), ChainBound::Unbounded);
        let shift = gallery_entry("shift-c4")
            .unwrap()
            .description()
            .to_system(1e-9)
            .unwrap();
        assert_eq!(shift, PartialAutomorphism::shift(4));
    }
}
