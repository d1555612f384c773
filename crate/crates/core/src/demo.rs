//! Procedural stand-in assets for smoke runs, tests and benchmarks.
//!
//! Writes small directories shaped like the real asset corpora (clean
//! scenes, streak and snow masks, tiered haze maps, shadow triplets,
//! reflection layers, watermark pairs, and several image domains), all drawn
//! from a seeded stream so the same call always produces the same bytes.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::imgcore::{save_image, ImageBuffer};
use crate::rng::{derive_stream, Stream};
use crate::scenario::Task;
use crate::synth::{ComponentSource, RunConfig};
use crate::weather::{HazeIntensity, Mode};

/// Names of the generated image domains for the linear-mix task.
pub const DOMAINS: [&str; 6] = ["fruit", "animal", "flower", "furniture", "landscape", "vehicle"];

/// Root of a generated corpus; see [`write_assets`].
#[derive(Debug, Clone, PartialEq)]
pub struct DemoAssets {
    pub root: PathBuf,
}

impl DemoAssets {
    pub fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// A run over these assets with `n` domains for the linear-mix task.
    pub fn config(&self, task: Task, n_domains: usize, output: &Path, samples: u64, size: usize) -> RunConfig {
        let source = |name: &str, dir: Option<PathBuf>| ComponentSource {
            name: name.to_string(),
            dir,
        };
        let (background_dir, components) = match task {
            Task::Task1 => (
                None,
                DOMAINS
                    .iter()
                    .cycle()
                    .take(n_domains)
                    .enumerate()
                    .map(|(i, d)| {
                        let name = if i < DOMAINS.len() {
                            d.to_string()
                        } else {
                            format!("{d}{i}")
                        };
                        source(&name, Some(self.dir(&format!("domains/{d}"))))
                    })
                    .collect(),
            ),
            Task::Task2a | Task::Task2b => {
                let mut c = vec![
                    source("rain_streak", Some(self.dir("rain_streak"))),
                    source("snow", Some(self.dir("snow"))),
                ];
                if task == Task::Task2a {
                    c.push(source("haze", Some(self.dir("haze"))));
                }
                c.push(source("raindrop", None));
                (Some(self.dir("scenes")), c)
            }
            Task::Task3 => (
                None,
                vec![
                    source("shadow", Some(self.dir("shadow"))),
                    source("reflection", Some(self.dir("reflection"))),
                    source("watermark", Some(self.dir("watermark"))),
                ],
            ),
        };
        RunConfig {
            task,
            mode: Mode::Test,
            master_seed: 0,
            samples,
            size,
            output: output.to_path_buf(),
            background_dir,
            components,
            probs: None,
            mixing_order: None,
            cases: None,
            haze_intensity: None,
            atmosphere_range: None,
            raindrop: None,
            vignette_strength: None,
            augment: false,
        }
    }
}

fn scene(rng: &mut Stream, size: usize) -> ImageBuffer {
    let waves: Vec<(f64, f64, f64, [f64; 3])> = (0..4)
        .map(|_| {
            let fx = rng.uniform_in(0.5, 4.0);
            let fy = rng.uniform_in(0.5, 4.0);
            let ph = rng.uniform_in(0.0, 2.0 * PI);
            let amp = [
                rng.uniform_in(0.05, 0.15),
                rng.uniform_in(0.05, 0.15),
                rng.uniform_in(0.05, 0.15),
            ];
            (fx, fy, ph, amp)
        })
        .collect();
    let base = [
        rng.uniform_in(0.3, 0.6),
        rng.uniform_in(0.3, 0.6),
        rng.uniform_in(0.3, 0.6),
    ];
    let rects: Vec<(f64, f64, f64, f64, [f64; 3])> = (0..6)
        .map(|_| {
            let x0 = rng.uniform();
            let y0 = rng.uniform();
            let w = rng.uniform_in(0.05, 0.35);
            let h = rng.uniform_in(0.05, 0.35);
            (x0, y0, w, h, [rng.uniform(), rng.uniform(), rng.uniform()])
        })
        .collect();
    let s = size as f64;
    ImageBuffer::from_fn(size, size, 3, |x, y, c| {
        let (u, v) = (x as f64 / s, y as f64 / s);
        for &(x0, y0, w, h, col) in rects.iter().rev() {
            if u >= x0 && u < x0 + w && v >= y0 && v < y0 + h {
                return (0.7 * col[c] + 0.15) as f32;
            }
        }
        let mut val = base[c];
        for &(fx, fy, ph, amp) in &waves {
            val += amp[c] * (2.0 * PI * (fx * u + fy * v) + ph).sin();
        }
        val as f32
    })
}

fn streak_mask(rng: &mut Stream, size: usize) -> ImageBuffer {
    let mut m = ImageBuffer::filled(size, size, 1, 0.0);
    let slope = rng.uniform_in(-0.35, 0.35);
    let count = size * 2;
    for _ in 0..count {
        let x0 = rng.uniform_in(0.0, size as f64);
        let y0 = rng.uniform_in(0.0, size as f64);
        let len = rng.uniform_in(0.04, 0.12) * size as f64;
        let val = rng.uniform_in(0.5, 1.0) as f32;
        for t in 0..len as usize {
            let y = y0 + t as f64;
            let x = x0 + slope * t as f64;
            if x >= 0.0 && y >= 0.0 && (x as usize) < size && (y as usize) < size {
                let (xi, yi) = (x as usize, y as usize);
                let cur = m.get(xi, yi, 0);
                m.set(xi, yi, 0, cur.max(val));
            }
        }
    }
    m
}

fn snow_mask(rng: &mut Stream, size: usize) -> ImageBuffer {
    let flakes: Vec<(f64, f64, f64)> = (0..size / 2)
        .map(|_| {
            (
                rng.uniform_in(0.0, size as f64),
                rng.uniform_in(0.0, size as f64),
                rng.uniform_in(0.6, 2.5),
            )
        })
        .collect();
    ImageBuffer::from_fn(size, size, 1, |x, y, _| {
        let mut v: f64 = 0.0;
        for &(fx, fy, r) in &flakes {
            let d = ((x as f64 - fx).powi(2) + (y as f64 - fy).powi(2)).sqrt();
            if d < r + 1.0 {
                v = v.max((r + 1.0 - d).min(1.0));
            }
        }
        v as f32
    })
}

fn haze_map(rng: &mut Stream, size: usize, tier: HazeIntensity) -> ImageBuffer {
    let beta = match tier {
        HazeIntensity::Light => 0.5,
        HazeIntensity::Moderate => 1.1,
        HazeIntensity::Heavy => 2.0,
    } * rng.uniform_in(0.9, 1.1);
    let horizon = rng.uniform_in(0.3, 0.5);
    let s = size as f64;
    ImageBuffer::from_fn(size, size, 1, |x, y, _| {
        let v = y as f64 / s;
        let depth = if v < horizon {
            1.0
        } else {
            1.0 - (v - horizon) / (1.0 - horizon) * 0.8
        };
        let depth = depth * (1.0 + 0.05 * (x as f64 / s * 6.0).sin());
        (-beta * depth).exp() as f32
    })
}

fn blob_mask(rng: &mut Stream, size: usize) -> ImageBuffer {
    let s = size as f64;
    let blobs: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.uniform_in(0.2, 0.8) * s,
                rng.uniform_in(0.2, 0.8) * s,
                rng.uniform_in(0.1, 0.25) * s,
                rng.uniform_in(0.1, 0.25) * s,
            )
        })
        .collect();
    ImageBuffer::from_fn(size, size, 1, |x, y, _| {
        let inside = blobs
            .iter()
            .any(|&(cx, cy, rx, ry)| ((x as f64 - cx) / rx).powi(2) + ((y as f64 - cy) / ry).powi(2) <= 1.0);
        if inside {
            1.0
        } else {
            0.0
        }
    })
}

fn watermark_pair(rng: &mut Stream, size: usize) -> (ImageBuffer, ImageBuffer) {
    let s = size as f64;
    let (x0, y0) = (rng.uniform_in(0.1, 0.4) * s, rng.uniform_in(0.1, 0.6) * s);
    let (w, h) = (rng.uniform_in(0.3, 0.5) * s, rng.uniform_in(0.1, 0.25) * s);
    let cell = (s / 32.0).max(1.0);
    let strength = rng.uniform_in(0.3, 0.6);
    let tint = [
        rng.uniform_in(0.7, 1.0),
        rng.uniform_in(0.7, 1.0),
        rng.uniform_in(0.7, 1.0),
    ];
    let inside = |x: usize, y: usize| {
        let (xf, yf) = (x as f64, y as f64);
        let glyph = (((xf - x0) / cell) as i64 + ((yf - y0) / cell) as i64 * 3) % 4 != 0;
        xf >= x0 && xf < x0 + w && yf >= y0 && yf < y0 + h && glyph
    };
    let rgb = ImageBuffer::from_fn(size, size, 3, |x, y, c| {
        if inside(x, y) {
            (strength * tint[c]) as f32
        } else {
            0.0
        }
    });
    let mask = ImageBuffer::from_fn(size, size, 1, |x, y, _| if inside(x, y) { 1.0 } else { 0.0 });
    (rgb, mask)
}

fn domain_image(rng: &mut Stream, size: usize, domain: usize) -> ImageBuffer {
    // Each domain has its own palette bias and texture frequency.
    let img = scene(rng, size);
    let freq = 2.0 + domain as f64 * 1.5;
    let hue = domain as f64 / DOMAINS.len() as f64;
    let s = size as f64;
    ImageBuffer::from_fn(size, size, 3, |x, y, c| {
        let tex = 0.1 * (2.0 * PI * freq * (x as f64 + y as f64 * 0.5) / s).sin();
        let bias = 0.15 * (2.0 * PI * (hue + c as f64 / 3.0)).cos();
        (img.get(x, y, c) as f64 + tex + bias) as f32
    })
}

/// Writes `per_dir` square images of side `size` per asset directory under
/// `root` and returns a handle for building run configs.
pub fn write_assets(root: &Path, size: usize, per_dir: usize, seed: u64) -> Result<DemoAssets> {
    let mut rng = derive_stream(seed, 0, 7);
    for i in 0..per_dir {
        let name = format!("{i:04}.png");
        save_image(&scene(&mut rng, size), root.join("scenes").join(&name))?;
        save_image(&streak_mask(&mut rng, size), root.join("rain_streak").join(&name))?;
        save_image(&snow_mask(&mut rng, size), root.join("snow").join(&name))?;
        for tier in HazeIntensity::ALL {
            save_image(
                &haze_map(&mut rng, size, tier),
                root.join("haze").join(tier.as_str()).join(&name),
            )?;
        }
        let free = scene(&mut rng, size);
        let mask = blob_mask(&mut rng, size);
        let darken = rng.uniform_in(0.35, 0.6);
        let shadow = ImageBuffer::from_fn(size, size, 3, |x, y, c| {
            let k = if mask.get(x, y, 0) > 0.5 {
                darken * [0.9, 0.95, 1.1][c]
            } else {
                1.0
            };
            (free.get(x, y, c) as f64 * k) as f32
        });
        save_image(&shadow, root.join("shadow/shadow").join(&name))?;
        save_image(&free, root.join("shadow/shadow_free").join(&name))?;
        save_image(&mask, root.join("shadow/mask").join(&name))?;
        let refl = scene(&mut rng, size).map(|v| v * 0.6);
        save_image(&refl, root.join("reflection").join(&name))?;
        let (rgb, wmask) = watermark_pair(&mut rng, size);
        save_image(&rgb, root.join("watermark/rgb").join(&name))?;
        save_image(&wmask, root.join("watermark/mask").join(&name))?;
        for (d, domain) in DOMAINS.iter().enumerate() {
            save_image(
                &domain_image(&mut rng, size, d),
                root.join("domains").join(domain).join(&name),
            )?;
        }
    }
    Ok(DemoAssets {
        root: root.to_path_buf(),
    })
}
