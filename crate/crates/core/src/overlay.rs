//! Shadow, reflection and watermark layers.

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_blur, heuristic_sigma, ImageBuffer};
use crate::rng::Stream;
use crate::weather::{occlude, Atmosphere, Mode};

pub const TEST_REFLECTION_KERNEL: usize = 11;
pub const TRAIN_REFLECTION_KERNELS: (usize, usize) = (3, 17);
pub const DEFAULT_VIGNETTE_STRENGTH: f64 = 0.4;

/// Paired shadow / shadow-free images with their shadow mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowTriplet {
    pub shadow: ImageBuffer,
    pub shadow_free: ImageBuffer,
    pub mask: ImageBuffer,
}

impl ShadowTriplet {
    pub fn new(shadow: ImageBuffer, shadow_free: ImageBuffer, mask: ImageBuffer) -> Result<Self> {
        shadow.ensure_same_shape(&shadow_free)?;
        if mask.channels() != 1 || !mask.same_grid(&shadow) {
            return Err(Error::dims(
                format!("{}x{}x1 mask", shadow.width(), shadow.height()),
                mask.shape_string(),
            ));
        }
        Ok(Self {
            shadow,
            shadow_free,
            mask,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionLayer {
    pub image: ImageBuffer,
    pub kernel_px: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WatermarkAsset {
    /// RGB watermark intensities, used directly as the blend weight.
    pub image: ImageBuffer,
    /// Binary coverage, the reconstruction target.
    pub mask: ImageBuffer,
}

impl WatermarkAsset {
    pub fn new(image: ImageBuffer, mask: ImageBuffer) -> Result<Self> {
        if !image.same_grid(&mask) || mask.channels() != 1 {
            return Err(Error::dims(
                format!("{}x{}x1 mask", image.width(), image.height()),
                mask.shape_string(),
            ));
        }
        let mask = mask.map(|v| if v > 0.5 { 1.0 } else { 0.0 });
        Ok(Self { image, mask })
    }
}

/// Picks the base image for a sample: the shadowed photo when the shadow
/// component is selected, otherwise the shadow-free one. The mask target is
/// zero when unselected.
pub fn shadow_base(triplet: &ShadowTriplet, shadow_selected: bool) -> (ImageBuffer, ImageBuffer) {
    if shadow_selected {
        (triplet.shadow.clone(), triplet.mask.clone())
    } else {
        (
            triplet.shadow_free.clone(),
            ImageBuffer::filled(triplet.mask.width(), triplet.mask.height(), 1, 0.0),
        )
    }
}

/// Odd kernel size for the reflection blur: uniform over the odd sizes in
/// `[3, 17]` when training, 11 at test time.
pub fn sample_reflection_kernel(rng: &mut Stream, mode: Mode) -> usize {
    match mode {
        Mode::Test => TEST_REFLECTION_KERNEL,
        Mode::Train => {
            let (lo, hi) = TRAIN_REFLECTION_KERNELS;
            let steps = ((hi - lo) / 2) as u64;
            lo + 2 * rng.int_inclusive(0, steps) as usize
        }
    }
}

/// `I = clamp(T + blur(R) V, 0, 1)`.
pub fn apply_reflection(t: &ImageBuffer, refl: &ReflectionLayer, v: &ImageBuffer) -> Result<ImageBuffer> {
    t.ensure_same_shape(&refl.image)?;
    if v.channels() != 1 {
        return Err(Error::invalid("vignette", "must be single-channel"));
    }
    t.ensure_broadcastable(v)?;
    let blurred = gaussian_blur(&refl.image, refl.kernel_px, heuristic_sigma(refl.kernel_px))?;
    let (rd, vd) = (blurred.data(), v.data());
    let data = t
        .data()
        .iter()
        .enumerate()
        .map(|(i, &tv)| tv + rd[i] * vd[t.broadcast_index(v, i)])
        .collect();
    Ok(ImageBuffer::from_raw_clamped(t.width(), t.height(), t.channels(), data))
}

/// Radial vignette: 1 at the center, `1 - strength` at the farthest corner,
/// with a squared-cosine profile `(1 - s) + s cos^2(pi d / 2)` over the
/// normalized radius `d`.
pub fn vignette_mask(width: usize, height: usize, strength: f64) -> ImageBuffer {
    let s = strength.clamp(0.0, 1.0);
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    let far = (cx * cx + cy * cy).sqrt();
    ImageBuffer::from_fn(width, height, 1, |x, y, _| {
        let d = if far > 0.0 {
            ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt() / far
        } else {
            0.0
        };
        let c = (std::f64::consts::FRAC_PI_2 * d).cos();
        ((1.0 - s) + s * c * c) as f32
    })
}

/// `I = J(1 - w) + A w` per channel, using the RGB watermark as `w`.
pub fn apply_watermark(j: &ImageBuffer, wm: &WatermarkAsset, a: Atmosphere) -> Result<ImageBuffer> {
    j.ensure_broadcastable(&wm.image)?;
    Ok(occlude(j, &wm.image, a.0))
}
