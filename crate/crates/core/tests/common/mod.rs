//! Naive per-pixel reference implementations and random fixtures.
//!
//! Everything here is written as plain double loops in f64 over `get`, with
//! no shared code from the library's kernels, so agreement is meaningful.

#![allow(dead_code)]

use bidbench_core::imgcore::ImageBuffer;
use bidbench_core::Stream;

pub fn random_image(rng: &mut Stream, w: usize, h: usize, ch: usize) -> ImageBuffer {
    ImageBuffer::from_fn(w, h, ch, |_, _, _| rng.uniform() as f32)
}

/// A mask with a mix of exact zeros, exact ones and fractional values.
pub fn random_mask(rng: &mut Stream, w: usize, h: usize) -> ImageBuffer {
    ImageBuffer::from_fn(w, h, 1, |_, _, _| match rng.below(4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.uniform() as f32,
    })
}

pub fn max_abs_diff(a: &ImageBuffer, b: &ImageBuffer) -> f64 {
    assert_eq!(
        (a.width(), a.height(), a.channels()),
        (b.width(), b.height(), b.channels())
    );
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (*x as f64 - *y as f64).abs())
        .fold(0.0, f64::max)
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

pub fn naive_linear_mix(images: &[&ImageBuffer]) -> ImageBuffer {
    let f = images[0];
    ImageBuffer::from_fn(f.width(), f.height(), f.channels(), |x, y, c| {
        let mut s = 0.0f64;
        for img in images {
            s += img.get(x, y, c) as f64;
        }
        (s / images.len() as f64) as f32
    })
}

fn mask_at(m: &ImageBuffer, x: usize, y: usize, c: usize) -> f64 {
    if m.channels() == 1 {
        m.get(x, y, 0) as f64
    } else {
        m.get(x, y, c) as f64
    }
}

/// `J(1 - m) + A m`.
pub fn naive_occlude(j: &ImageBuffer, m: &ImageBuffer, a: f64) -> ImageBuffer {
    ImageBuffer::from_fn(j.width(), j.height(), j.channels(), |x, y, c| {
        let mv = mask_at(m, x, y, c);
        clamp01(j.get(x, y, c) as f64 * (1.0 - mv) + a * mv) as f32
    })
}

/// `J t + A(1 - t)`.
pub fn naive_haze(j: &ImageBuffer, t: &ImageBuffer, a: f64) -> ImageBuffer {
    ImageBuffer::from_fn(j.width(), j.height(), j.channels(), |x, y, c| {
        let tv = t.get(x, y, 0) as f64;
        clamp01(j.get(x, y, c) as f64 * tv + a * (1.0 - tv)) as f32
    })
}

/// Dense 2-D Gaussian convolution with clamped borders; sigma from the
/// kernel-size heuristic.
pub fn naive_blur(img: &ImageBuffer, k: usize) -> Vec<f64> {
    let sigma = 0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8;
    let half = (k / 2) as i64;
    let mut weights = vec![vec![0.0; k]; k];
    let mut total = 0.0;
    for (j, row) in weights.iter_mut().enumerate() {
        for (i, w) in row.iter_mut().enumerate() {
            let dx = i as f64 - half as f64;
            let dy = j as f64 - half as f64;
            *w = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            total += *w;
        }
    }
    let (w, h, ch) = (img.width() as i64, img.height() as i64, img.channels());
    let mut out = Vec::with_capacity(img.data().len());
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0;
                for (j, row) in weights.iter().enumerate() {
                    for (i, wt) in row.iter().enumerate() {
                        let sx = (x + i as i64 - half).clamp(0, w - 1) as usize;
                        let sy = (y + j as i64 - half).clamp(0, h - 1) as usize;
                        acc += wt * img.get(sx, sy, c) as f64;
                    }
                }
                out.push(acc / total);
            }
        }
    }
    out
}

/// `clamp(T + blur(R) V)`.
pub fn naive_reflection(t: &ImageBuffer, r: &ImageBuffer, k: usize, v: &ImageBuffer) -> ImageBuffer {
    let blurred = naive_blur(r, k);
    let ch = t.channels();
    ImageBuffer::from_fn(t.width(), t.height(), ch, |x, y, c| {
        let b = blurred[(y * t.width() + x) * ch + c];
        clamp01(t.get(x, y, c) as f64 + b * v.get(x, y, 0) as f64) as f32
    })
}

/// `(1 - c) O + c D`.
pub fn naive_merge(o: &ImageBuffer, d: &ImageBuffer, cov: &ImageBuffer) -> ImageBuffer {
    ImageBuffer::from_fn(o.width(), o.height(), o.channels(), |x, y, c| {
        let cv = cov.get(x, y, 0) as f64;
        clamp01((1.0 - cv) * o.get(x, y, c) as f64 + cv * d.get(x, y, c) as f64) as f32
    })
}

fn naive_bilinear(img: &ImageBuffer, x: f64, y: f64, c: usize) -> f64 {
    let x = x.max(0.0).min((img.width() - 1) as f64);
    let y = y.max(0.0).min((img.height() - 1) as f64);
    let (xf, yf) = (x.floor(), y.floor());
    let (ax, ay) = (x - xf, y - yf);
    let at = |xi: f64, yi: f64| {
        let xi = (xi as usize).min(img.width() - 1);
        let yi = (yi as usize).min(img.height() - 1);
        img.get(xi, yi, c) as f64
    };
    (1.0 - ax) * (1.0 - ay) * at(xf, yf)
        + ax * (1.0 - ay) * at(xf + 1.0, yf)
        + (1.0 - ax) * ay * at(xf, yf + 1.0)
        + ax * ay * at(xf + 1.0, yf + 1.0)
}

/// Covered pixels sample the scene at `p + gain (R - 0.5, G - 0.5) B`.
pub fn naive_distort(o: &ImageBuffer, r: &[f32], g: &[f32], b: &[f32], cov: &ImageBuffer, gain: f64) -> ImageBuffer {
    let w = o.width();
    ImageBuffer::from_fn(w, o.height(), o.channels(), |x, y, c| {
        let i = y * w + x;
        if cov.get(x, y, 0) <= 0.0 {
            return o.get(x, y, c);
        }
        let sx = x as f64 + gain * (r[i] as f64 - 0.5) * b[i] as f64;
        let sy = y as f64 + gain * (g[i] as f64 - 0.5) * b[i] as f64;
        naive_bilinear(o, sx, sy, c) as f32
    })
}
