//! Float raster images and the pixel primitives shared by every mixing model.

mod augment;
mod color;
mod filter;
mod io;

pub use augment::{augment, augment_with, AugmentDraw, AugmentParams};
pub use color::{srgb_to_lab, LabBuffer};
pub(crate) use filter::sample_bilinear;
pub use filter::{gaussian_blur, gaussian_kernel, heuristic_sigma, resize_bilinear};
pub use io::{load_image, save_image};

use crate::error::{Error, Result};

/// An H×W×C image with samples in `[0, 1]`, stored row-major and interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid("channels", format!("must be 1 or 3, got {channels}")));
        }
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("image has zero area"));
        }
        if data.len() != width * height * channels {
            return Err(Error::dims(
                format!("{} samples", width * height * channels),
                format!("{} samples", data.len()),
            ));
        }
        if let Some(bad) = data.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::invalid("data", format!("sample {bad} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds an image whose samples are clamped into range.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        assert!(width > 0 && height > 0, "image must have non-zero area");
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(clamp_unit(f(x, y, c)));
                }
            }
        }
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: f32) -> Self {
        Self::from_fn(width, height, channels, |_, _, _| value)
    }

    /// Wraps already-validated data; every sample is clamped.
    pub(crate) fn from_raw_clamped(width: usize, height: usize, channels: usize, mut data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        for s in &mut data {
            *s = clamp_unit(*s);
        }
        Self {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, value: f32) {
        self.data[(y * self.width + x) * self.channels + c] = clamp_unit(value);
    }

    pub fn same_grid(&self, other: &ImageBuffer) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn same_shape(&self, other: &ImageBuffer) -> bool {
        self.same_grid(other) && self.channels == other.channels
    }

    pub(crate) fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.width, self.height, self.channels)
    }

    pub(crate) fn ensure_same_shape(&self, other: &ImageBuffer) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::dims(self.shape_string(), other.shape_string()))
        }
    }

    /// Checks that `mask` is single-channel (or matches `self`) on the same grid.
    pub(crate) fn ensure_broadcastable(&self, mask: &ImageBuffer) -> Result<()> {
        if self.same_grid(mask) && (mask.channels == 1 || mask.channels == self.channels) {
            Ok(())
        } else {
            Err(Error::dims(
                format!("{}x{}x(1|{})", self.width, self.height, self.channels),
                mask.shape_string(),
            ))
        }
    }

    /// Sample of a mask that is broadcast across this image's channels.
    #[inline]
    pub(crate) fn broadcast_index(&self, mask: &ImageBuffer, sample_index: usize) -> usize {
        if mask.channels == self.channels {
            sample_index
        } else {
            sample_index / self.channels
        }
    }

    /// BT.601 luma for RGB; a copy for single-channel images.
    pub fn to_luma(&self) -> ImageBuffer {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self.data.chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect();
        Self::from_raw_clamped(self.width, self.height, 1, data)
    }

    /// Replicates a gray image into three channels.
    pub fn to_rgb(&self) -> ImageBuffer {
        if self.channels == 3 {
            return self.clone();
        }
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        Self {
            width: self.width,
            height: self.height,
            channels: 3,
            data,
        }
    }

    /// Pointwise map over every sample.
    pub fn map(&self, f: impl Fn(f32) -> f32) -> ImageBuffer {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Self::from_raw_clamped(self.width, self.height, self.channels, data)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }
}

#[inline]
pub(crate) fn clamp_unit(v: f32) -> f32 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[inline]
pub(crate) fn luma(r: f32, g: f32, b: f32) -> f32 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) as f32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths_and_ranges() {
        assert!(ImageBuffer::new(2, 2, 1, vec![0.0; 3]).is_err());
        assert!(ImageBuffer::new(2, 2, 2, vec![0.0; 8]).is_err());
        assert!(ImageBuffer::new(1, 1, 1, vec![1.5]).is_err());
        assert!(ImageBuffer::new(1, 1, 3, vec![0.1, 0.2, 0.3]).is_ok());
    }

    #[test]
    fn from_fn_clamps() {
        let img = ImageBuffer::from_fn(2, 1, 1, |x, _, _| if x == 0 { -1.0 } else { 2.0 });
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn gray_rgb_round_trip() {
        let g = ImageBuffer::from_fn(3, 2, 1, |x, y, _| (x + y) as f32 / 4.0);
        assert_eq!(g.to_rgb().to_luma().data().len(), 6);
        for (a, b) in g.to_rgb().to_luma().data().iter().zip(g.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
