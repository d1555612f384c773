use serde::{Deserialize, Serialize};

use super::{resize_bilinear, ImageBuffer};
use crate::rng::Stream;

/// Training-time geometry: resize to `load_size`, random `crop_size` crop,
/// horizontal flip with probability `flip_prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    pub load_size: usize,
    pub crop_size: usize,
    pub flip_prob: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        Self {
            load_size: 286,
            crop_size: 256,
            flip_prob: 0.5,
        }
    }
}

/// The random choices of one augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AugmentDraw {
    pub crop_x: usize,
    pub crop_y: usize,
    pub flip: bool,
}

impl AugmentDraw {
    pub fn sample(params: &AugmentParams, rng: &mut Stream) -> Self {
        let slack = params.load_size.saturating_sub(params.crop_size) as u64;
        let crop_x = rng.int_inclusive(0, slack) as usize;
        let crop_y = rng.int_inclusive(0, slack) as usize;
        let flip = rng.bernoulli(params.flip_prob);
        Self { crop_x, crop_y, flip }
    }
}

pub fn augment(img: &ImageBuffer, rng: &mut Stream) -> ImageBuffer {
    let params = AugmentParams::default();
    let draw = AugmentDraw::sample(&params, rng);
    augment_with(img, &params, draw)
}

/// Applies a fixed augmentation draw.
pub fn augment_with(img: &ImageBuffer, params: &AugmentParams, draw: AugmentDraw) -> ImageBuffer {
    let load = params.load_size.max(params.crop_size);
    let resized = resize_bilinear(img, load, load).expect("load size is non-zero");
    let crop = params.crop_size;
    let x0 = draw.crop_x.min(load - crop);
    let y0 = draw.crop_y.min(load - crop);
    ImageBuffer::from_fn(crop, crop, img.channels(), |x, y, c| {
        let sx = if draw.flip { crop - 1 - x } else { x };
        resized.get(x0 + sx, y0 + y, c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    fn sample_image() -> ImageBuffer {
        ImageBuffer::from_fn(40, 30, 3, |x, y, c| ((x * 5 + y * 3 + c) % 17) as f32 / 16.0)
    }

    #[test]
    fn output_is_always_crop_size() {
        let img = sample_image();
        for i in 0..20 {
            let mut rng = derive_stream(3, i, 0);
            let out = augment(&img, &mut rng);
            assert_eq!((out.width(), out.height(), out.channels()), (256, 256, 3));
        }
    }

    #[test]
    fn forced_origin_without_flip_is_top_left() {
        let img = sample_image();
        let params = AugmentParams::default();
        let out = augment_with(
            &img,
            &params,
            AugmentDraw {
                crop_x: 0,
                crop_y: 0,
                flip: false,
            },
        );
        let resized = resize_bilinear(&img, 286, 286).unwrap();
        for y in [0, 17, 255] {
            for x in [0, 101, 255] {
                assert_eq!(out.get(x, y, 1), resized.get(x, y, 1));
            }
        }
    }

    #[test]
    fn flip_is_an_involution() {
        let img = sample_image();
        let params = AugmentParams::default();
        let draw = AugmentDraw {
            crop_x: 11,
            crop_y: 5,
            flip: true,
        };
        let flipped = augment_with(&img, &params, draw);
        let plain = augment_with(&img, &params, AugmentDraw { flip: false, ..draw });
        let twice = ImageBuffer::from_fn(256, 256, 3, |x, y, c| flipped.get(255 - x, y, c));
        assert_eq!(twice, plain);
    }
}
