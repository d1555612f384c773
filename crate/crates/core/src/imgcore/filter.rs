use super::ImageBuffer;
use crate::error::{Error, Result};

/// Sigma used when only a kernel size is known: `0.3 * ((k - 1) / 2 - 1) + 0.8`.
pub fn heuristic_sigma(kernel_px: usize) -> f64 {
    0.3 * ((kernel_px as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Sampled, normalized 1-D Gaussian of odd length.
pub fn gaussian_kernel(kernel_px: usize, sigma: f64) -> Result<Vec<f64>> {
    if kernel_px == 0 || kernel_px % 2 == 0 {
        return Err(Error::invalid(
            "kernel_px",
            format!("must be odd and >= 1, got {kernel_px}"),
        ));
    }
    if sigma.is_nan() || sigma <= 0.0 || sigma.is_infinite() {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    let half = (kernel_px / 2) as i64;
    let raw: Vec<f64> = (-half..=half)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / sum).collect())
}

/// Separable Gaussian blur with clamp-to-edge borders.
pub fn gaussian_blur(img: &ImageBuffer, kernel_px: usize, sigma: f64) -> Result<ImageBuffer> {
    let kernel = gaussian_kernel(kernel_px, sigma)?;
    if kernel_px == 1 {
        return Ok(img.clone());
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let half = (kernel_px / 2) as isize;
    let src = img.data();

    let mut tmp = vec![0.0f64; src.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (k, wk) in kernel.iter().enumerate() {
                    let sx = (x as isize + k as isize - half).clamp(0, w as isize - 1) as usize;
                    acc += wk * src[(y * w + sx) * ch + c] as f64;
                }
                tmp[(y * w + x) * ch + c] = acc;
            }
        }
    }
    let mut out = vec![0.0f32; src.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (k, wk) in kernel.iter().enumerate() {
                    let sy = (y as isize + k as isize - half).clamp(0, h as isize - 1) as usize;
                    acc += wk * tmp[(sy * w + x) * ch + c];
                }
                out[(y * w + x) * ch + c] = acc as f32;
            }
        }
    }
    Ok(ImageBuffer::from_raw_clamped(w, h, ch, out))
}

/// Bilinear sample at a continuous position (pixel centers on integers),
/// clamping coordinates to the image.
#[inline]
pub(crate) fn sample_bilinear(img: &ImageBuffer, x: f64, y: f64, c: usize) -> f32 {
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(img.width() - 1);
    let y1 = (y0 + 1).min(img.height() - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let v00 = img.get(x0, y0, c) as f64;
    let v10 = img.get(x1, y0, c) as f64;
    let v01 = img.get(x0, y1, c) as f64;
    let v11 = img.get(x1, y1, c) as f64;
    let top = v00 + (v10 - v00) * fx;
    let bottom = v01 + (v11 - v01) * fx;
    (top + (bottom - top) * fy) as f32
}

/// Bilinear resize with half-pixel centers.
pub fn resize_bilinear(img: &ImageBuffer, width: usize, height: usize) -> Result<ImageBuffer> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("resize target has zero area"));
    }
    if width == img.width() && height == img.height() {
        return Ok(img.clone());
    }
    let sx = img.width() as f64 / width as f64;
    let sy = img.height() as f64 / height as f64;
    let ch = img.channels();
    let mut out = Vec::with_capacity(width * height * ch);
    for y in 0..height {
        let src_y = (y as f64 + 0.5) * sy - 0.5;
        for x in 0..width {
            let src_x = (x as f64 + 0.5) * sx - 0.5;
            for c in 0..ch {
                out.push(sample_bilinear(img, src_x, src_y, c));
            }
        }
    }
    Ok(ImageBuffer::from_raw_clamped(width, height, ch, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_heuristic() {
        assert!((heuristic_sigma(3) - 0.8).abs() < 1e-12);
        assert!((heuristic_sigma(11) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn even_kernel_rejected() {
        let img = ImageBuffer::filled(4, 4, 1, 0.5);
        assert!(gaussian_blur(&img, 4, 1.0).is_err());
        assert!(gaussian_blur(&img, 3, 0.0).is_err());
    }

    #[test]
    fn constant_preserved_and_size_one_is_identity() {
        let img = ImageBuffer::filled(9, 7, 3, 0.375);
        let b = gaussian_blur(&img, 5, 1.3).unwrap();
        for v in b.data() {
            assert!((v - 0.375).abs() < 1e-6);
        }
        let noisy = ImageBuffer::from_fn(5, 5, 1, |x, y, _| ((x * 7 + y * 3) % 5) as f32 / 4.0);
        assert_eq!(gaussian_blur(&noisy, 1, 2.0).unwrap(), noisy);
    }

    #[test]
    fn impulse_matches_dense_convolution() {
        let sigma = heuristic_sigma(3);
        let img = ImageBuffer::from_fn(3, 3, 1, |x, y, _| if x == 1 && y == 1 { 1.0 } else { 0.0 });
        let out = gaussian_blur(&img, 3, sigma).unwrap();
        // Dense 2-D normalized sampled Gaussian.
        let mut dense = [[0.0f64; 3]; 3];
        let mut total = 0.0;
        for (j, row) in dense.iter_mut().enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                let (dx, dy) = (i as f64 - 1.0, j as f64 - 1.0);
                *v = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                total += *v;
            }
        }
        for (y, row) in dense.iter().enumerate() {
            for (x, v) in row.iter().enumerate() {
                let expect = v / total;
                assert!((out.get(x, y, 0) as f64 - expect).abs() < 1e-6);
            }
        }
        // Frozen center weight for k=3, sigma=0.8: 0.52201146875^2.
        assert!((out.get(1, 1, 0) as f64 - 0.5220114687540189f64.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn interior_mean_preserved() {
        // A pattern surrounded by a wide constant border.
        let img = ImageBuffer::from_fn(32, 32, 1, |x, y, _| {
            if (8..24).contains(&x) && (8..24).contains(&y) {
                ((x * 13 + y * 5) % 11) as f32 / 10.0
            } else {
                0.25
            }
        });
        let out = gaussian_blur(&img, 5, 1.1).unwrap();
        assert!((img.mean() - out.mean()).abs() < 1e-6);
    }

    #[test]
    fn resize_constant_and_identity() {
        let img = ImageBuffer::filled(10, 6, 3, 0.7);
        let r = resize_bilinear(&img, 23, 17).unwrap();
        assert_eq!((r.width(), r.height()), (23, 17));
        assert!(r.data().iter().all(|v| (v - 0.7).abs() < 1e-6));
        assert_eq!(resize_bilinear(&img, 10, 6).unwrap(), img);
    }
}
