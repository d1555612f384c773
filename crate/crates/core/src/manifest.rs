//! Per-sample JSON-lines records of how each mixed image was produced.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{CaseMask, ComponentKind, SampledParams, Task};
use crate::weather::Mode;

/// Name used for the clean base image in file names and reports.
pub const BACKGROUND_NAME: &str = "background";

/// Canonical id of the sample at `index`.
pub fn sample_id(index: u64) -> String {
    format!("{index:06}")
}

/// Ground-truth file of one selected component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthEntry {
    pub index: usize,
    pub name: String,
    pub kind: ComponentKind,
    /// Relative to the dataset root.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixManifest {
    pub sample_id: String,
    pub sample_index: u64,
    pub master_seed: u64,
    pub task: Task,
    pub mode: Mode,
    pub size: usize,
    pub augment: bool,
    /// Names of all components in index order.
    pub components: Vec<String>,
    pub case: CaseMask,
    pub case_label: String,
    pub probs: Vec<f64>,
    pub mixing_order: Vec<usize>,
    /// Asset file used per component name (and for the background).
    pub sources: BTreeMap<String, String>,
    pub params: SampledParams,
    /// Relative to the dataset root.
    pub mixed: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub background: Option<String>,
    pub ground_truths: Vec<GroundTruthEntry>,
}

impl MixManifest {
    /// Checks the record's internal consistency.
    pub fn validate(&self) -> Result<()> {
        if self.case.len() != self.ground_truths.len() {
            return Err(Error::invalid(
                "ground_truths",
                format!(
                    "sample {}: case {} selects {} components but lists {} ground truths",
                    self.sample_id,
                    self.case_label,
                    self.case.len(),
                    self.ground_truths.len()
                ),
            ));
        }
        for gt in &self.ground_truths {
            if !self.case.contains(gt.index) {
                return Err(Error::invalid(
                    "ground_truths",
                    format!(
                        "sample {}: `{}` is not selected by case {}",
                        self.sample_id, gt.name, self.case_label
                    ),
                ));
            }
        }
        if self.case.label() != self.case_label {
            return Err(Error::invalid(
                "case_label",
                format!(
                    "sample {}: {} does not match bits {}",
                    self.sample_id,
                    self.case_label,
                    self.case.bits()
                ),
            ));
        }
        if self.task.has_background() != self.background.is_some() {
            return Err(Error::invalid(
                "background",
                format!("sample {}: wrong background entry", self.sample_id),
            ));
        }
        Ok(())
    }
}

/// Writes one JSON object per line.
pub fn write_manifests(path: &Path, manifests: &[MixManifest]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for m in manifests {
        let line = serde_json::to_string(m).expect("manifest serialization cannot fail");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads and validates a JSON-lines manifest; blank lines are skipped.
pub fn read_manifests(path: &Path) -> Result<Vec<MixManifest>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let m: MixManifest = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        m.validate().map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(m);
    }
    Ok(out)
}
