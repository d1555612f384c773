//! Rain streak, snow and haze imaging models.
//!
//! Streaks and snow occlude the scene with atmospheric light,
//! `I = J(1 - m) + A m`; haze follows Koschmieder's law,
//! `I = J t + A(1 - t)`. Masks and transmission maps are single-channel and
//! broadcast across RGB.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::imgcore::ImageBuffer;
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskKind {
    RainStreak,
    Snow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaskLayer {
    pub mask: ImageBuffer,
    pub kind: MaskKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HazeIntensity {
    Light,
    Moderate,
    Heavy,
}

impl HazeIntensity {
    pub const ALL: [HazeIntensity; 3] = [HazeIntensity::Light, HazeIntensity::Moderate, HazeIntensity::Heavy];

    pub fn as_str(self) -> &'static str {
        match self {
            HazeIntensity::Light => "light",
            HazeIntensity::Moderate => "moderate",
            HazeIntensity::Heavy => "heavy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap {
    pub t: ImageBuffer,
    pub intensity: Option<HazeIntensity>,
}

/// Global atmospheric light.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atmosphere(pub f32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    Test,
}

pub const TEST_ATMOSPHERE: f32 = 0.9;
pub const TRAIN_ATMOSPHERE_RANGE: (f64, f64) = (0.8, 1.0);

/// `I = J(1 - m) + A m`, with `m` broadcast over channels.
pub fn apply_mask_composite(j: &ImageBuffer, m: &MaskLayer, a: Atmosphere) -> Result<ImageBuffer> {
    j.ensure_broadcastable(&m.mask)?;
    Ok(occlude(j, &m.mask, a.0))
}

/// Shared `J(1 - w) + A w` kernel for masks (broadcast) and RGB overlays.
pub(crate) fn occlude(j: &ImageBuffer, w: &ImageBuffer, a: f32) -> ImageBuffer {
    let wd = w.data();
    let data = j
        .data()
        .iter()
        .enumerate()
        .map(|(i, &jv)| {
            let mv = wd[j.broadcast_index(w, i)];
            jv * (1.0 - mv) + a * mv
        })
        .collect();
    ImageBuffer::from_raw_clamped(j.width(), j.height(), j.channels(), data)
}

/// `I = J t + A(1 - t)`.
pub fn apply_haze(j: &ImageBuffer, t: &TransmissionMap, a: Atmosphere) -> Result<ImageBuffer> {
    j.ensure_broadcastable(&t.t)?;
    let td = t.t.data();
    let data = j
        .data()
        .iter()
        .enumerate()
        .map(|(i, &jv)| {
            let tv = td[j.broadcast_index(&t.t, i)];
            jv * tv + a.0 * (1.0 - tv)
        })
        .collect();
    Ok(ImageBuffer::from_raw_clamped(j.width(), j.height(), j.channels(), data))
}

/// Draws `A`: uniform over `range` in training, exactly 0.9 at test time.
pub fn sample_atmosphere(rng: &mut Stream, mode: Mode, range: (f64, f64)) -> Atmosphere {
    match mode {
        Mode::Test => Atmosphere(TEST_ATMOSPHERE),
        Mode::Train => Atmosphere(rng.uniform_in(range.0, range.1) as f32),
    }
}
