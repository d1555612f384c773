use super::ImageBuffer;
use crate::error::{Error, Result};

/// CIELAB image, one `[L, a, b]` triple per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct LabBuffer {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f64; 3]>,
}

// D65 reference white, 2° observer.
const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
];

#[inline]
fn srgb_to_linear(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

#[inline]
fn lab_f(t: f64) -> f64 {
    const EPS: f64 = 216.0 / 24389.0;
    const KAPPA: f64 = 24389.0 / 27.0;
    if t > EPS {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

pub(crate) fn rgb_pixel_to_lab(rgb: [f64; 3]) -> [f64; 3] {
    let lin = rgb.map(srgb_to_linear);
    let mut xyz = [0.0; 3];
    for (row, out) in RGB_TO_XYZ.iter().zip(&mut xyz) {
        *out = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
    }
    let f = [
        lab_f(xyz[0] / WHITE[0]),
        lab_f(xyz[1] / WHITE[1]),
        lab_f(xyz[2] / WHITE[2]),
    ];
    [116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])]
}

/// sRGB (D65) to CIELAB. Requires a 3-channel image.
pub fn srgb_to_lab(img: &ImageBuffer) -> Result<LabBuffer> {
    if img.channels() != 3 {
        return Err(Error::invalid("img", "LAB conversion needs an RGB image"));
    }
    let data = img
        .data()
        .chunks_exact(3)
        .map(|p| rgb_pixel_to_lab([p[0] as f64, p[1] as f64, p[2] as f64]))
        .collect();
    Ok(LabBuffer {
        width: img.width(),
        height: img.height(),
        data,
    })
}
