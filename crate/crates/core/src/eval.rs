//! Scoring method outputs against a generated dataset.
//!
//! Outputs live in one directory as `<sample_id>.<component>.png`, with the
//! clean base image named `background`. An optional `predictions.jsonl` holds
//! one `{"sample_id": ..., "logits": [...]}` object per sample.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{load_image, ImageBuffer};
use crate::manifest::{MixManifest, BACKGROUND_NAME};
use crate::metrics::{
    mean_of, psnr, rmse_lab, ssim, CaseReport, LabRmse, LabRmseMeans, MetricReport, PredictionVector, TargetScores,
};
use crate::scenario::{CaseMask, ComponentKind};

pub const PREDICTIONS_FILE: &str = "predictions.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub logits: Vec<f64>,
}

pub fn write_predictions(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("prediction serialization cannot fail");
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_predictions(path: &Path) -> Result<BTreeMap<String, PredictionVector>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: PredictionRecord = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.insert(r.sample_id, PredictionVector::new(r.logits));
    }
    Ok(out)
}

/// Metrics of one reconstruction target in one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSample {
    pub psnr: f64,
    pub ssim: f64,
    pub rmse_lab: Option<LabRmse>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleScores {
    pub sample_id: String,
    pub case: CaseMask,
    pub components: Vec<String>,
    pub targets: BTreeMap<String, TargetSample>,
    pub correct: Option<bool>,
}

/// Brings `output` to the channel layout of the target it is scored against.
fn match_channels(output: ImageBuffer, target: &ImageBuffer) -> ImageBuffer {
    match (output.channels(), target.channels()) {
        (3, 1) => output.to_luma(),
        (1, 3) => output.to_rgb(),
        _ => output,
    }
}

fn score_target(output: &ImageBuffer, target: &ImageBuffer, region: Option<&ImageBuffer>) -> Result<TargetSample> {
    let rmse = if target.channels() == 3 {
        Some(rmse_lab(output, target, region)?)
    } else {
        None
    };
    Ok(TargetSample {
        psnr: psnr(output, target)?,
        ssim: ssim(output, target)?,
        rmse_lab: rmse,
    })
}

/// Scores every reconstruction target of one sample. Reflection layers are
/// mixed but not scored.
pub fn score_sample(
    m: &MixManifest,
    dataset_root: &Path,
    outputs_dir: &Path,
    prediction: Option<&PredictionVector>,
) -> Result<SampleScores> {
    let mut targets: Vec<(String, String)> = Vec::new();
    if let Some(bg) = &m.background {
        targets.push((BACKGROUND_NAME.to_string(), bg.clone()));
    }
    for gt in &m.ground_truths {
        if gt.kind.is_scored() {
            targets.push((gt.name.clone(), gt.path.clone()));
        }
    }
    let region = match m.ground_truths.iter().find(|g| g.kind == ComponentKind::ShadowPair) {
        Some(g) => Some(load_image(dataset_root.join(&g.path))?.to_luma()),
        None => None,
    };
    let mut scores = BTreeMap::new();
    for (name, rel) in targets {
        let out_path = outputs_dir.join(format!("{}.{}.png", m.sample_id, name));
        if !out_path.is_file() {
            return Err(Error::MissingOutput {
                sample_id: m.sample_id.clone(),
                path: out_path,
            });
        }
        let target = load_image(dataset_root.join(&rel))?;
        let output = match_channels(load_image(&out_path)?, &target);
        let region = if name == BACKGROUND_NAME { region.as_ref() } else { None };
        scores.insert(name, score_target(&output, &target, region)?);
    }
    let correct = match prediction {
        Some(p) => {
            if p.logits.len() != m.components.len() {
                return Err(Error::dims(
                    format!("{} logits for sample {}", m.components.len(), m.sample_id),
                    p.logits.len(),
                ));
            }
            Some(p.matches(m.case))
        }
        None => None,
    };
    Ok(SampleScores {
        sample_id: m.sample_id.clone(),
        case: m.case,
        components: m
            .case
            .indices()
            .into_iter()
            .filter_map(|i| m.components.get(i - 1).cloned())
            .collect(),
        targets: scores,
        correct,
    })
}

fn aggregate(label: String, components: Vec<String>, samples: &[&SampleScores]) -> CaseReport {
    let names: BTreeSet<&String> = samples.iter().flat_map(|s| s.targets.keys()).collect();
    let mut targets = BTreeMap::new();
    for name in names {
        let hits: Vec<&TargetSample> = samples.iter().filter_map(|s| s.targets.get(name)).collect();
        let rmses: Vec<LabRmse> = hits.iter().filter_map(|t| t.rmse_lab).collect();
        let rmse_lab = (!rmses.is_empty()).then(|| LabRmseMeans {
            shadow: mean_of(rmses.iter().filter_map(|r| r.shadow)),
            non_shadow: mean_of(rmses.iter().filter_map(|r| r.non_shadow)),
            all: mean_of(rmses.iter().map(|r| r.all)).unwrap_or(0.0),
        });
        targets.insert(
            name.clone(),
            TargetScores {
                count: hits.len(),
                psnr: mean_of(hits.iter().map(|t| t.psnr)).unwrap_or(f64::NAN),
                ssim: mean_of(hits.iter().map(|t| t.ssim)).unwrap_or(f64::NAN),
                rmse_lab,
            },
        );
    }
    let accuracy = if samples.iter().all(|s| s.correct.is_some()) && !samples.is_empty() {
        mean_of(samples.iter().map(|s| if s.correct == Some(true) { 1.0 } else { 0.0 }))
    } else {
        None
    };
    CaseReport {
        case: label,
        components,
        samples: samples.len(),
        targets,
        accuracy,
    }
}

/// Groups per-sample scores by case; the result does not depend on input order.
pub fn build_report(mut scores: Vec<SampleScores>) -> MetricReport {
    scores.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    let mut groups: BTreeMap<(usize, u32), Vec<&SampleScores>> = BTreeMap::new();
    for s in &scores {
        groups.entry((s.case.len(), s.case.bits())).or_default().push(s);
    }
    let cases = groups
        .values()
        .map(|g| aggregate(g[0].case.label(), g[0].components.clone(), g))
        .collect();
    let all: Vec<&SampleScores> = scores.iter().collect();
    MetricReport {
        samples: scores.len(),
        cases,
        overall: aggregate("all".to_string(), Vec::new(), &all),
    }
}

/// Scores the outputs in `outputs_dir` for every manifest. Accuracy is
/// reported only when `predictions.jsonl` exists there.
pub fn eval_run(manifests: &[MixManifest], dataset_root: &Path, outputs_dir: &Path) -> Result<MetricReport> {
    if manifests.is_empty() {
        return Err(Error::EmptyInput("no manifests to evaluate"));
    }
    let mut ids = BTreeSet::new();
    for m in manifests {
        if !ids.insert(m.sample_id.as_str()) {
            return Err(Error::invalid(
                "manifests",
                format!("duplicate sample id {}", m.sample_id),
            ));
        }
    }
    let pred_path = outputs_dir.join(PREDICTIONS_FILE);
    let predictions = if pred_path.is_file() {
        Some(read_predictions(&pred_path)?)
    } else {
        None
    };
    let scores = manifests
        .par_iter()
        .map(|m| {
            let p = match &predictions {
                Some(all) => Some(all.get(&m.sample_id).ok_or_else(|| Error::MissingOutput {
                    sample_id: m.sample_id.clone(),
                    path: pred_path.clone(),
                })?),
                None => None,
            };
            score_sample(m, dataset_root, outputs_dir, p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(scores))
}
