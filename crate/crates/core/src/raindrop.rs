//! Procedural raindrops on a lens.
//!
//! Drops are placed at random, each with one to three smaller satellites,
//! and advanced along y by a radius-proportional velocity over a randomly
//! chosen time index. Coverage comes from a summed inverse-square metaball
//! field, so neighbouring drops merge. A refraction table (texture-x,
//! texture-y, thickness) derived from a spherical-cap surface displaces the
//! lookup into the scene; the distorted image is darkened, blurred and
//! alpha-merged back using the coverage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{gaussian_blur, heuristic_sigma, sample_bilinear, ImageBuffer};
use crate::rng::Stream;
use crate::weather::Mode;

pub const TEST_RATE: f32 = 0.9;
pub const BLUR_KERNEL: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaindropConfig {
    /// Inclusive range of composite drops per image.
    pub count: (u64, u64),
    /// Parent radius range in pixels.
    pub radius: (f64, f64),
    /// Velocity constant: `velocity_y = k * radius`, pixels per step.
    pub velocity_k: f64,
    pub time_steps: u64,
    /// Satellite radius as a fraction of the parent radius.
    pub satellite_scale: (f64, f64),
    /// Displacement gain in pixels for a drop of the maximum radius.
    pub gain: f64,
    /// Soft threshold band of the metaball field.
    pub threshold: (f64, f64),
    pub field_eps: f64,
    /// Light-reduction rate range used in training.
    pub rate_range: (f64, f64),
}

impl Default for RaindropConfig {
    fn default() -> Self {
        Self {
            count: (5, 25),
            radius: (4.0, 24.0),
            velocity_k: 0.5,
            time_steps: 8,
            satellite_scale: (0.3, 0.7),
            gain: 30.0,
            threshold: (0.8, 1.2),
            field_eps: 1e-6,
            rate_range: (0.8, 0.98),
        }
    }
}

impl RaindropConfig {
    /// Defaults with pixel quantities scaled from a 256 px reference side.
    pub fn scaled_for(width: usize, height: usize) -> Self {
        let s = width.min(height) as f64 / 256.0;
        let base = Self::default();
        Self {
            radius: (base.radius.0 * s, base.radius.1 * s),
            velocity_k: base.velocity_k * s,
            gain: base.gain * s,
            ..base
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count.0 > self.count.1 {
            return Err(Error::invalid("raindrop.count", "min exceeds max"));
        }
        if !(self.radius.0 > 0.0 && self.radius.0 <= self.radius.1) {
            return Err(Error::invalid("raindrop.radius", "need 0 < min <= max"));
        }
        if self.time_steps == 0 {
            return Err(Error::invalid("raindrop.time_steps", "must be >= 1"));
        }
        if !(self.satellite_scale.0 > 0.0
            && self.satellite_scale.1 < 1.0
            && self.satellite_scale.0 <= self.satellite_scale.1)
        {
            return Err(Error::invalid("raindrop.satellite_scale", "need 0 < min <= max < 1"));
        }
        if self.threshold.0.partial_cmp(&self.threshold.1) != Some(std::cmp::Ordering::Less) {
            return Err(Error::invalid("raindrop.threshold", "need lo < hi"));
        }
        if self.field_eps.is_nan() || self.field_eps <= 0.0 {
            return Err(Error::invalid("raindrop.field_eps", "must be > 0"));
        }
        if !(self.rate_range.0 > 0.0 && self.rate_range.1 <= 1.0 && self.rate_range.0 <= self.rate_range.1) {
            return Err(Error::invalid("raindrop.rate_range", "need 0 < lo <= hi <= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raindrop {
    pub center: (f64, f64),
    pub radius: f64,
    pub satellites: Vec<Ball>,
    pub velocity_y: f64,
}

impl Raindrop {
    pub fn new(center: (f64, f64), radius: f64, satellites: Vec<Ball>, velocity_k: f64) -> Self {
        Self {
            center,
            radius,
            satellites,
            velocity_y: velocity_k * radius,
        }
    }

    /// The parent followed by its satellites.
    pub fn balls(&self) -> impl Iterator<Item = Ball> + '_ {
        std::iter::once(Ball {
            x: self.center.0,
            y: self.center.1,
            radius: self.radius,
        })
        .chain(self.satellites.iter().copied())
    }

    fn advance(&mut self, dy: f64) {
        self.center.1 += dy;
        for s in &mut self.satellites {
            s.y += dy;
        }
    }
}

/// Samples drop geometry for one image, already advanced to a random time index.
pub fn sample_raindrops(rng: &mut Stream, cfg: &RaindropConfig, width: usize, height: usize) -> Vec<Raindrop> {
    let count = rng.int_inclusive(cfg.count.0, cfg.count.1);
    let tau = rng.below(cfg.time_steps) as f64;
    (0..count)
        .map(|_| {
            let cx = rng.uniform_in(0.0, width as f64);
            let cy = rng.uniform_in(0.0, height as f64);
            let radius = rng.uniform_in(cfg.radius.0, cfg.radius.1);
            let n_sat = rng.int_inclusive(1, 3);
            let satellites = (0..n_sat)
                .map(|_| {
                    let r = radius * rng.uniform_in(cfg.satellite_scale.0, cfg.satellite_scale.1);
                    let angle = rng.uniform_in(0.0, std::f64::consts::TAU);
                    let dist = radius * rng.uniform_in(0.5, 1.0);
                    Ball {
                        x: cx + dist * angle.cos(),
                        y: cy + dist * angle.sin(),
                        radius: r,
                    }
                })
                .collect();
            let mut drop = Raindrop::new((cx, cy), radius, satellites, cfg.velocity_k);
            drop.advance(drop.velocity_y * tau);
            drop
        })
        .collect()
}

#[inline]
fn smoothstep(lo: f64, hi: f64, v: f64) -> f64 {
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Metaball field `F(p) = sum r^2 / (|p - c|^2 + eps)` at a pixel.
pub fn field_at(drops: &[Raindrop], eps: f64, px: f64, py: f64) -> f64 {
    drops
        .iter()
        .flat_map(|d| d.balls())
        .map(|b| {
            let (dx, dy) = (px - b.x, py - b.y);
            b.radius * b.radius / (dx * dx + dy * dy + eps)
        })
        .sum()
}

/// Coverage in `[0, 1]`: smoothstep of the field over the threshold band.
pub fn metaball_coverage(drops: &[Raindrop], width: usize, height: usize, cfg: &RaindropConfig) -> ImageBuffer {
    let (lo, hi) = cfg.threshold;
    ImageBuffer::from_fn(width, height, 1, |x, y, _| {
        smoothstep(lo, hi, field_at(drops, cfg.field_eps, x as f64, y as f64)) as f32
    })
}

/// Texture and thickness lookup over the image grid, masked by coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct RefractionTable {
    pub width: usize,
    pub height: usize,
    /// Texture-x, 0.5 = no deflection.
    pub r: Vec<f32>,
    /// Texture-y, 0.5 = no deflection.
    pub g: Vec<f32>,
    /// Normalized cap thickness.
    pub b: Vec<f32>,
    /// Per-pixel gain multiplier (dominant drop radius / max radius).
    pub scale: Vec<f32>,
    pub coverage: ImageBuffer,
}

impl RefractionTable {
    /// A table with unit gain scale everywhere, for externally supplied channels.
    pub fn from_channels(r: Vec<f32>, g: Vec<f32>, b: Vec<f32>, coverage: ImageBuffer) -> Result<Self> {
        let n = coverage.pixel_count();
        if coverage.channels() != 1 || r.len() != n || g.len() != n || b.len() != n {
            return Err(Error::dims(
                format!("{n} table entries"),
                format!("{}/{}/{}", r.len(), g.len(), b.len()),
            ));
        }
        Ok(Self {
            width: coverage.width(),
            height: coverage.height(),
            r,
            g,
            b,
            scale: vec![1.0; n],
            coverage,
        })
    }
}

/// Builds the refraction table: each covered pixel takes the spherical cap of
/// the ball contributing most to the field there.
pub fn build_refraction_table(
    drops: &[Raindrop],
    coverage: &ImageBuffer,
    cfg: &RaindropConfig,
) -> Result<RefractionTable> {
    if coverage.channels() != 1 {
        return Err(Error::invalid("coverage", "must be single-channel"));
    }
    let (w, h) = (coverage.width(), coverage.height());
    let n = w * h;
    let mut r = vec![0.0f32; n];
    let mut g = vec![0.0f32; n];
    let mut b = vec![0.0f32; n];
    let mut scale = vec![0.0f32; n];
    let r_max = cfg.radius.1.max(f64::MIN_POSITIVE);
    let balls: Vec<Ball> = drops.iter().flat_map(|d| d.balls()).collect();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if coverage.data()[i] <= 0.0 {
                continue;
            }
            let (px, py) = (x as f64, y as f64);
            let dominant = balls.iter().max_by(|p, q| {
                let fp = p.radius * p.radius / ((px - p.x).powi(2) + (py - p.y).powi(2) + cfg.field_eps);
                let fq = q.radius * q.radius / ((px - q.x).powi(2) + (py - q.y).powi(2) + cfg.field_eps);
                fp.total_cmp(&fq)
            });
            let Some(ball) = dominant else { continue };
            let (dx, dy) = (px - ball.x, py - ball.y);
            let d2 = dx * dx + dy * dy;
            let rr = ball.radius * ball.radius;
            b[i] = ((rr - d2).max(0.0).sqrt() / ball.radius) as f32;
            r[i] = (0.5 + 0.5 * dx / ball.radius).clamp(0.0, 1.0) as f32;
            g[i] = (0.5 + 0.5 * dy / ball.radius).clamp(0.0, 1.0) as f32;
            scale[i] = (ball.radius / r_max).min(1.0) as f32;
        }
    }
    Ok(RefractionTable {
        width: w,
        height: h,
        r,
        g,
        b,
        scale,
        coverage: coverage.clone(),
    })
}

/// Warps `o` through the table: the pixel at `(u, v)` shows the scene at
/// `(u + gain s (R - 0.5) B, v + gain s (G - 0.5) B)`, bilinearly sampled with
/// clamped borders. Uncovered pixels are copied.
pub fn distort(o: &ImageBuffer, table: &RefractionTable, gain: f64) -> Result<ImageBuffer> {
    if o.width() != table.width || o.height() != table.height {
        return Err(Error::dims(
            format!("{}x{}", table.width, table.height),
            format!("{}x{}", o.width(), o.height()),
        ));
    }
    let (w, h, ch) = (o.width(), o.height(), o.channels());
    let mut out = o.data().to_vec();
    for v in 0..h {
        for u in 0..w {
            let i = v * w + u;
            if table.coverage.data()[i] <= 0.0 {
                continue;
            }
            let k = gain * table.scale[i] as f64 * table.b[i] as f64;
            let sx = u as f64 + k * (table.r[i] as f64 - 0.5);
            let sy = v as f64 + k * (table.g[i] as f64 - 0.5);
            for c in 0..ch {
                out[i * ch + c] = sample_bilinear(o, sx, sy, c);
            }
        }
    }
    Ok(ImageBuffer::from_raw_clamped(w, h, ch, out))
}

/// Light reduction: covered pixels scale by `rate` (`0 < rate <= 1`); then a
/// 3 px Gaussian blur over the whole distorted image.
pub fn attenuate_and_blur(d: &ImageBuffer, rate: f32, coverage: &ImageBuffer) -> Result<ImageBuffer> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::invalid("rate", format!("must be in (0, 1], got {rate}")));
    }
    d.ensure_broadcastable(coverage)?;
    let cov = coverage.data();
    let data = d
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if cov[d.broadcast_index(coverage, i)] > 0.0 {
                rate * v
            } else {
                v
            }
        })
        .collect();
    let reduced = ImageBuffer::from_raw_clamped(d.width(), d.height(), d.channels(), data);
    gaussian_blur(&reduced, BLUR_KERNEL, heuristic_sigma(BLUR_KERNEL))
}

/// `I = (1 - c) O + c D` with `c` the drop coverage.
pub fn merge_raindrop(o: &ImageBuffer, d: &ImageBuffer, coverage: &ImageBuffer) -> Result<ImageBuffer> {
    o.ensure_same_shape(d)?;
    o.ensure_broadcastable(coverage)?;
    let cov = coverage.data();
    let dd = d.data();
    let data = o
        .data()
        .iter()
        .enumerate()
        .map(|(i, &ov)| {
            let c = cov[o.broadcast_index(coverage, i)];
            if c <= 0.0 {
                ov
            } else {
                (1.0 - c) * ov + c * dd[i]
            }
        })
        .collect();
    Ok(ImageBuffer::from_raw_clamped(o.width(), o.height(), o.channels(), data))
}

/// Draws the light-reduction rate: uniform in `range` for training, 0.9 at test.
pub fn sample_rate(rng: &mut Stream, mode: Mode, range: (f64, f64)) -> f32 {
    match mode {
        Mode::Test => TEST_RATE,
        Mode::Train => rng.uniform_in(range.0, range.1) as f32,
    }
}

/// Result of rendering drops onto one image.
#[derive(Debug, Clone)]
pub struct RaindropRender {
    pub image: ImageBuffer,
    pub coverage: ImageBuffer,
    pub drops: Vec<Raindrop>,
    pub rate: f32,
}

/// The full drop pipeline on a scene, from an rng positioned for this sample.
pub fn render_raindrops(o: &ImageBuffer, rng: &mut Stream, cfg: &RaindropConfig, mode: Mode) -> Result<RaindropRender> {
    cfg.validate()?;
    let drops = sample_raindrops(rng, cfg, o.width(), o.height());
    let rate = sample_rate(rng, mode, cfg.rate_range);
    let coverage = metaball_coverage(&drops, o.width(), o.height(), cfg);
    let table = build_refraction_table(&drops, &coverage, cfg)?;
    let distorted = distort(o, &table, cfg.gain)?;
    let dimmed = attenuate_and_blur(&distorted, rate, &coverage)?;
    let image = merge_raindrop(o, &dimmed, &coverage)?;
    Ok(RaindropRender {
        image,
        coverage,
        drops,
        rate,
    })
}

/// Stable digest of a drop list (hex SHA-256 over the little-endian fields).
pub fn geometry_digest(drops: &[Raindrop]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for d in drops {
        for ball in d.balls() {
            hasher.update(ball.x.to_le_bytes());
            hasher.update(ball.y.to_le_bytes());
            hasher.update(ball.radius.to_le_bytes());
        }
        hasher.update(d.velocity_y.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;

    fn single(x: f64, y: f64, r: f64) -> Raindrop {
        Raindrop::new((x, y), r, Vec::new(), 0.5)
    }

    #[test]
    fn velocity_proportional_to_radius() {
        let a = single(0.0, 0.0, 3.0);
        let b = single(0.0, 0.0, 6.0);
        assert_eq!(b.velocity_y / a.velocity_y, 2.0);
    }

    #[test]
    fn sampling_is_deterministic_and_respects_config() {
        let cfg = RaindropConfig::default();
        let a = sample_raindrops(&mut derive_stream(1, 2, 3), &cfg, 256, 256);
        let b = sample_raindrops(&mut derive_stream(1, 2, 3), &cfg, 256, 256);
        assert_eq!(a, b);
        assert!((5..=25).contains(&(a.len() as u64)));
        for d in &a {
            assert!(d.radius >= 4.0 && d.radius <= 24.0);
            assert!((1..=3).contains(&d.satellites.len()));
            assert!(d.satellites.iter().all(|s| s.radius < d.radius));
            assert!((d.velocity_y - 0.5 * d.radius).abs() < 1e-12);
        }
    }

    #[test]
    fn single_time_step_keeps_initial_positions() {
        let cfg = RaindropConfig {
            time_steps: 1,
            ..RaindropConfig::default()
        };
        // Replay the draws by hand: count, tau, then per-drop geometry.
        let mut rng = derive_stream(4, 0, 0);
        let drops = sample_raindrops(&mut rng.clone(), &cfg, 64, 64);
        let count = rng.int_inclusive(cfg.count.0, cfg.count.1);
        assert_eq!(rng.below(1), 0);
        assert_eq!(count as usize, drops.len());
        let cx = rng.uniform_in(0.0, 64.0);
        let cy = rng.uniform_in(0.0, 64.0);
        assert_eq!(drops[0].center, (cx, cy));
    }

    #[test]
    fn field_closed_forms() {
        let cfg = RaindropConfig::default();
        let r = 5.0;
        let d = single(10.0, 10.0, r);
        let at_center = field_at(std::slice::from_ref(&d), cfg.field_eps, 10.0, 10.0);
        assert!(at_center >= r * r / cfg.field_eps * 0.999);
        let cov = metaball_coverage(std::slice::from_ref(&d), 32, 32, &cfg);
        assert_eq!(cov.get(10, 10, 0), 1.0);
        // Distance 2r: F = 1/4 < 0.8.
        let f = field_at(std::slice::from_ref(&d), cfg.field_eps, 20.0, 10.0);
        assert!((f - 0.25).abs() < 1e-6);
        assert_eq!(cov.get(20, 10, 0), 0.0);
    }

    #[test]
    fn nearby_drops_merge() {
        let cfg = RaindropConfig::default();
        // Each drop alone gives F = 0.6 at the midpoint: r^2 / d^2 = 0.6.
        let r = 3.0f64;
        let d = (r * r / 0.6).sqrt();
        let drops = [single(20.0 - d, 20.0, r), single(20.0 + d, 20.0, r)];
        let one = field_at(&drops[..1], cfg.field_eps, 20.0, 20.0);
        assert!((one - 0.6).abs() < 1e-6);
        let both = field_at(&drops, cfg.field_eps, 20.0, 20.0);
        assert!((both - 1.2).abs() < 1e-6);
        assert!(smoothstep(cfg.threshold.0, cfg.threshold.1, both) > 0.99);
        assert!(smoothstep(cfg.threshold.0, cfg.threshold.1, one) == 0.0);
    }

    #[test]
    fn isolated_drop_has_fourfold_symmetry() {
        let cfg = RaindropConfig::default();
        let d = single(16.0, 16.0, 6.5);
        let cov = metaball_coverage(&[d], 33, 33, &cfg);
        for y in 0..33 {
            for x in 0..33 {
                let v = cov.get(x, y, 0);
                assert_eq!(v, cov.get(32 - x, y, 0));
                assert_eq!(v, cov.get(x, 32 - y, 0));
                assert_eq!(v, cov.get(y, x, 0));
            }
        }
    }

    #[test]
    fn table_cap_geometry() {
        let cfg = RaindropConfig {
            radius: (4.0, 8.0),
            ..RaindropConfig::default()
        };
        let r = 8.0;
        let drops = [single(20.0, 20.0, r)];
        let cov = metaball_coverage(&drops, 48, 48, &cfg);
        let t = build_refraction_table(&drops, &cov, &cfg).unwrap();
        let idx = |x: usize, y: usize| y * 48 + x;
        let apex = idx(20, 20);
        assert_eq!(t.b[apex], 1.0);
        assert_eq!((t.r[apex], t.g[apex]), (0.5, 0.5));
        // Far corner is uncovered.
        let far = idx(0, 47);
        assert_eq!((t.r[far], t.g[far], t.b[far]), (0.0, 0.0, 0.0));
        assert!(t.coverage.data().iter().zip(&t.b).all(|(&c, &b)| c > 0.0 || b == 0.0));

        // Off-grid point at d = r / sqrt(2) on +x, checked via a drop centered
        // so that the sample falls on a pixel.
        let off = r / 2f64.sqrt();
        let drops = [single(10.0 - off, 10.0, r)];
        let cov = metaball_coverage(&drops, 24, 24, &cfg);
        let t = build_refraction_table(&drops, &cov, &cfg).unwrap();
        let i = 10 * 24 + 10;
        assert!((t.b[i] as f64 - 1.0 / 2f64.sqrt()).abs() < 1e-6);
        assert!(t.r[i] > 0.5);
        assert_eq!(t.g[i], 0.5);
    }

    fn ramp(w: usize, h: usize) -> ImageBuffer {
        ImageBuffer::from_fn(w, h, 3, |x, y, c| ((x * 7 + y * 3 + c) % 50) as f32 / 49.0)
    }

    #[test]
    fn zero_thickness_is_identity() {
        let o = ramp(16, 12);
        let cov = ImageBuffer::filled(16, 12, 1, 1.0);
        let n = 16 * 12;
        let t = RefractionTable::from_channels(vec![0.9; n], vec![0.1; n], vec![0.0; n], cov).unwrap();
        assert_eq!(distort(&o, &t, 30.0).unwrap(), o);
    }

    #[test]
    fn full_deflection_shifts_by_half_gain() {
        let o = ramp(16, 12);
        let cov = ImageBuffer::filled(16, 12, 1, 1.0);
        let n = 16 * 12;
        let t = RefractionTable::from_channels(vec![1.0; n], vec![0.5; n], vec![1.0; n], cov).unwrap();
        let out = distort(&o, &t, 4.0).unwrap();
        for y in 0..12 {
            for x in 0..12 {
                for c in 0..3 {
                    assert_eq!(out.get(x, y, c), o.get(x + 2, y, c));
                }
            }
        }
    }

    #[test]
    fn distort_rejects_size_mismatch() {
        let o = ramp(16, 12);
        let cov = ImageBuffer::filled(8, 8, 1, 1.0);
        let t = RefractionTable::from_channels(vec![0.5; 64], vec![0.5; 64], vec![0.0; 64], cov).unwrap();
        assert!(distort(&o, &t, 4.0).is_err());
    }

    #[test]
    fn attenuation() {
        let ones = ImageBuffer::filled(8, 8, 3, 1.0);
        let full = ImageBuffer::filled(8, 8, 1, 1.0);
        let out = attenuate_and_blur(&ones, 0.9, &full).unwrap();
        assert!(out.data().iter().all(|v| (v - 0.9).abs() < 1e-6));
        let c = ImageBuffer::filled(8, 8, 3, 0.4);
        let out = attenuate_and_blur(&c, 1.0, &full).unwrap();
        assert!(out.data().iter().all(|v| (v - 0.4).abs() < 1e-6));
        assert!(attenuate_and_blur(&c, 0.0, &full).is_err());
        assert!(attenuate_and_blur(&c, 1.1, &full).is_err());
        let mut rng = derive_stream(0, 0, 0);
        assert_eq!(sample_rate(&mut rng, Mode::Test, (0.8, 0.98)), 0.9);
    }

    #[test]
    fn merge_blend() {
        let o = ImageBuffer::filled(4, 4, 3, 0.2);
        let d = ImageBuffer::filled(4, 4, 3, 0.8);
        let zero = ImageBuffer::filled(4, 4, 1, 0.0);
        let one = ImageBuffer::filled(4, 4, 1, 1.0);
        let half = ImageBuffer::filled(4, 4, 1, 0.5);
        assert_eq!(merge_raindrop(&o, &d, &zero).unwrap(), o);
        assert_eq!(merge_raindrop(&o, &d, &one).unwrap(), d);
        assert!(merge_raindrop(&o, &d, &half)
            .unwrap()
            .data()
            .iter()
            .all(|v| (v - 0.5).abs() < 1e-6));
        assert!(merge_raindrop(&o, &ImageBuffer::filled(3, 4, 3, 0.1), &zero).is_err());
    }

    #[test]
    fn render_passes_uncovered_pixels_through() {
        let o = ramp(64, 64);
        let cfg = RaindropConfig::scaled_for(64, 64);
        let out = render_raindrops(&o, &mut derive_stream(8, 1, 2), &cfg, Mode::Test).unwrap();
        assert_eq!(out.rate, 0.9);
        for (i, &c) in out.coverage.data().iter().enumerate() {
            if c == 0.0 {
                for ch in 0..3 {
                    assert_eq!(out.image.data()[i * 3 + ch], o.data()[i * 3 + ch]);
                }
            }
        }
        let again = render_raindrops(&o, &mut derive_stream(8, 1, 2), &cfg, Mode::Test).unwrap();
        assert_eq!(out.image, again.image);
        assert_eq!(geometry_digest(&out.drops), geometry_digest(&again.drops));
    }

    #[test]
    fn config_validation() {
        assert!(RaindropConfig::default().validate().is_ok());
        let bad = RaindropConfig {
            radius: (5.0, 2.0),
            ..RaindropConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
