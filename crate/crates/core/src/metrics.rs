//! Full-reference image metrics and source-prediction accuracy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_kernel, srgb_to_lab, ImageBuffer};
use crate::scenario::CaseMask;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// PSNR in dB with peak 1.0. Identical images give `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    a.ensure_same_shape(b)?;
    let mut sum = Neumaier::default();
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let d = x as f64 - y as f64;
        sum.add(d * d);
    }
    let mse = sum.total() / a.data().len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

fn luma_plane(img: &ImageBuffer) -> Vec<f64> {
    if img.channels() == 1 {
        img.data().iter().map(|&v| v as f64).collect()
    } else {
        img.data()
            .chunks_exact(3)
            .map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64)
            .collect()
    }
}

/// Valid-mode separable filtering of a `w`x`h` plane.
fn filter_valid(plane: &[f64], w: usize, h: usize, kernel: &[f64]) -> (Vec<f64>, usize, usize) {
    let k = kernel.len();
    let ow = w + 1 - k;
    let oh = h + 1 - k;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let mut acc = 0.0;
            for (i, wk) in kernel.iter().enumerate() {
                acc += wk * plane[y * w + x + i];
            }
            rows[y * ow + x] = acc;
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (i, wk) in kernel.iter().enumerate() {
                acc += wk * rows[(y + i) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    (out, ow, oh)
}

/// Mean single-scale SSIM over all fully contained 11x11 Gaussian windows
/// (sigma 1.5, K1 0.01, K2 0.03, range 1.0), on luma for RGB input.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    a.ensure_same_shape(b)?;
    if a.width() < SSIM_WINDOW || a.height() < SSIM_WINDOW {
        return Err(Error::invalid(
            "image",
            format!(
                "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {}x{}",
                a.width(),
                a.height()
            ),
        ));
    }
    let (w, h) = (a.width(), a.height());
    let kernel = gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)?;
    let pa = luma_plane(a);
    let pb = luma_plane(b);
    let aa: Vec<f64> = pa.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = pb.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    let (mu_a, _, _) = filter_valid(&pa, w, h, &kernel);
    let (mu_b, _, _) = filter_valid(&pb, w, h, &kernel);
    let (e_aa, _, _) = filter_valid(&aa, w, h, &kernel);
    let (e_bb, _, _) = filter_valid(&bb, w, h, &kernel);
    let (e_ab, _, _) = filter_valid(&ab, w, h, &kernel);
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut sum = Neumaier::default();
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        sum.add(num / den);
    }
    Ok(sum.total() / mu_a.len() as f64)
}

/// LAB root-mean-square error split by shadow region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabRmse {
    pub shadow: Option<f64>,
    pub non_shadow: Option<f64>,
    pub all: f64,
}

/// RMSE over the L, a and b channels jointly: `sqrt(mean(dL^2, da^2, db^2))`
/// over the pixels of each region. A region with no pixels is `None`;
/// without a mask only `all` is reported. Mask pixels above 0.5 are shadow.
pub fn rmse_lab(a: &ImageBuffer, b: &ImageBuffer, region: Option<&ImageBuffer>) -> Result<LabRmse> {
    a.ensure_same_shape(b)?;
    if let Some(m) = region {
        if !m.same_grid(a) || m.channels() != 1 {
            return Err(Error::dims(
                format!("{}x{}x1 mask", a.width(), a.height()),
                m.shape_string(),
            ));
        }
    }
    let la = srgb_to_lab(&a.to_rgb())?;
    let lb = srgb_to_lab(&b.to_rgb())?;
    let mut acc = [Neumaier::default(), Neumaier::default(), Neumaier::default()];
    let mut counts = [0usize; 3];
    for (i, (p, q)) in la.data.iter().zip(&lb.data).enumerate() {
        let e = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
        acc[2].add(e);
        counts[2] += 1;
        if let Some(m) = region {
            let slot = if m.data()[i] > 0.5 { 0 } else { 1 };
            acc[slot].add(e);
            counts[slot] += 1;
        }
    }
    let rms = |k: usize| (counts[k] > 0).then(|| (acc[k].total() / (3 * counts[k]) as f64).sqrt());
    Ok(LabRmse {
        shadow: rms(0),
        non_shadow: rms(1),
        all: rms(2).unwrap_or(0.0),
    })
}

/// Per-component logits for one input; a component is predicted present
/// when its logit is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionVector {
    pub logits: Vec<f64>,
}

impl PredictionVector {
    pub const THRESHOLD: f64 = 0.0;

    pub fn new(logits: Vec<f64>) -> Self {
        Self { logits }
    }

    /// Predicted component bits (may be empty).
    pub fn predicted_bits(&self) -> u32 {
        self.logits
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > Self::THRESHOLD)
            .fold(0u32, |bits, (i, _)| bits | (1 << i))
    }

    pub fn matches(&self, truth: CaseMask) -> bool {
        self.predicted_bits() == truth.bits()
    }
}

/// Fraction of samples whose thresholded logits reproduce the exact set.
pub fn prediction_accuracy(preds: &[PredictionVector], truths: &[CaseMask]) -> Result<f64> {
    if preds.len() != truths.len() {
        return Err(Error::dims(
            format!("{} predictions", truths.len()),
            format!("{}", preds.len()),
        ));
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput("no predictions to score"));
    }
    let correct = preds.iter().zip(truths).filter(|(p, &t)| p.matches(t)).count();
    Ok(correct as f64 / preds.len() as f64)
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        if v.is_infinite() || self.sum.is_infinite() {
            self.sum += v;
            return;
        }
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        if self.sum.is_infinite() {
            self.sum
        } else {
            self.sum + self.comp
        }
    }
}

pub(crate) fn mean_of(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut acc = Neumaier::default();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    (n > 0).then(|| acc.total() / n as f64)
}

/// Means for one scored target within a group of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetScores {
    pub count: usize,
    /// Mean PSNR; `"inf"` in JSON when every sample was reconstructed exactly.
    #[serde(with = "psnr_value")]
    pub psnr: f64,
    pub ssim: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rmse_lab: Option<LabRmseMeans>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabRmseMeans {
    pub shadow: Option<f64>,
    pub non_shadow: Option<f64>,
    pub all: f64,
}

/// Scores for every sample of one case (or all samples, for the aggregate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    /// Letter label of the case, or `"all"` for the aggregate.
    pub case: String,
    pub components: Vec<String>,
    pub samples: usize,
    pub targets: BTreeMap<String, TargetScores>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub samples: usize,
    pub cases: Vec<CaseReport>,
    pub overall: CaseReport,
}

impl MetricReport {
    pub fn case(&self, label: &str) -> Option<&CaseReport> {
        self.cases.iter().find(|c| c.case == label)
    }

    /// Plain-text table: one row per case, PSNR/SSIM per target, accuracy.
    pub fn to_table(&self) -> String {
        let mut targets: Vec<&String> = self.overall.targets.keys().collect();
        targets.sort();
        let mut out = String::new();
        out.push_str(&format!("{:<10} {:>6}", "case", "n"));
        for t in &targets {
            out.push_str(&format!(" {:>18}", format!("{t} PSNR/SSIM")));
        }
        out.push_str(&format!(" {:>7}\n", "acc"));
        for row in self.cases.iter().chain(std::iter::once(&self.overall)) {
            out.push_str(&format!("{:<10} {:>6}", row.case, row.samples));
            for t in &targets {
                let cell = match row.targets.get(*t) {
                    Some(s) if s.psnr.is_infinite() => format!("inf/{:.3}", s.ssim),
                    Some(s) => format!("{:.2}/{:.3}", s.psnr, s.ssim),
                    None => "-".to_string(),
                };
                out.push_str(&format!(" {cell:>18}"));
            }
            match row.accuracy {
                Some(a) => out.push_str(&format!(" {a:>7.3}\n")),
                None => out.push_str(&format!(" {:>7}\n", "-")),
            }
        }
        out
    }
}

mod psnr_value {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad PSNR value {s:?}"))),
        }
    }
}
