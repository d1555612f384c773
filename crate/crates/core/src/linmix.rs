//! Linear mixing: the mixed image is the arithmetic mean of the selected sources.

use crate::error::{Error, Result};
use crate::imgcore::ImageBuffer;

/// Per-pixel mean of equally shaped images. No weights are applied.
pub fn linear_mix(images: &[&ImageBuffer]) -> Result<ImageBuffer> {
    let (first, rest) = images
        .split_first()
        .ok_or(Error::EmptyInput("linear_mix needs at least one image"))?;
    for img in rest {
        first.ensure_same_shape(img)?;
    }
    let count = images.len() as f64;
    let mut acc = vec![0.0f64; first.data().len()];
    for img in images {
        for (a, &v) in acc.iter_mut().zip(img.data()) {
            *a += v as f64;
        }
    }
    let data = acc.into_iter().map(|s| (s / count) as f32).collect();
    Ok(ImageBuffer::from_raw_clamped(
        first.width(),
        first.height(),
        first.channels(),
        data,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_image_is_identity() {
        let img = ImageBuffer::from_fn(5, 4, 3, |x, y, c| ((x + 2 * y + c) % 7) as f32 / 6.0);
        assert_eq!(linear_mix(&[&img]).unwrap(), img);
    }

    #[test]
    fn constant_means() {
        let a = ImageBuffer::filled(3, 3, 1, 0.2);
        let b = ImageBuffer::filled(3, 3, 1, 0.6);
        let m = linear_mix(&[&a, &b]).unwrap();
        assert!(m.data().iter().all(|v| (v - 0.4).abs() < 1e-6));

        let cs: Vec<_> = [0.0, 0.4, 0.8, 1.0]
            .iter()
            .map(|&v| ImageBuffer::filled(2, 2, 3, v))
            .collect();
        let refs: Vec<_> = cs.iter().collect();
        let m = linear_mix(&refs).unwrap();
        assert!(m.data().iter().all(|v| (v - 0.55).abs() < 1e-6));
    }

    #[test]
    fn errors() {
        assert!(linear_mix(&[]).is_err());
        let a = ImageBuffer::filled(3, 3, 1, 0.2);
        let b = ImageBuffer::filled(3, 2, 1, 0.2);
        let c = ImageBuffer::filled(3, 3, 3, 0.2);
        assert!(linear_mix(&[&a, &b]).is_err());
        assert!(linear_mix(&[&a, &c]).is_err());
    }

    fn byte_image() -> impl Strategy<Value = ImageBuffer> {
        prop::collection::vec(0u8..=255, 12)
            .prop_map(|bytes| ImageBuffer::new(2, 2, 3, bytes.into_iter().map(|b| b as f32 / 255.0).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_bounded(imgs in prop::collection::vec(byte_image(), 1..6)) {
            let refs: Vec<_> = imgs.iter().collect();
            let mut rev = refs.clone();
            rev.reverse();
            let fwd = linear_mix(&refs).unwrap();
            prop_assert_eq!(&fwd, &linear_mix(&rev).unwrap());
            for i in 0..fwd.data().len() {
                let lo = imgs.iter().map(|m| m.data()[i]).fold(f32::INFINITY, f32::min);
                let hi = imgs.iter().map(|m| m.data()[i]).fold(f32::NEG_INFINITY, f32::max);
                prop_assert!(fwd.data()[i] >= lo && fwd.data()[i] <= hi);
            }
        }

        #[test]
        fn repeated_image_is_fixed_point(img in byte_image(), n in 1usize..9) {
            let refs = vec![&img; n];
            prop_assert_eq!(linear_mix(&refs).unwrap(), img.clone());
        }
    }
}
