use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CaseMask, ComponentKind, ComponentSpec, SelectionPolicy, Task};
use crate::error::{Error, Result};
use crate::imgcore::{gaussian_blur, heuristic_sigma, ImageBuffer};
use crate::linmix::linear_mix;
use crate::overlay::{
    apply_reflection, apply_watermark, sample_reflection_kernel, shadow_base, vignette_mask, ReflectionLayer,
    ShadowTriplet, WatermarkAsset, DEFAULT_VIGNETTE_STRENGTH,
};
use crate::raindrop::{geometry_digest, render_raindrops, RaindropConfig, BLUR_KERNEL};
use crate::rng::Stream;
use crate::weather::{
    apply_haze, apply_mask_composite, sample_atmosphere, HazeIntensity, MaskKind, MaskLayer, Mode, TransmissionMap,
    TRAIN_ATMOSPHERE_RANGE,
};

/// Input for one selected (or, for shadows, base-providing) component.
#[derive(Debug, Clone)]
pub enum ComponentAsset {
    Image(ImageBuffer),
    Mask(ImageBuffer),
    Transmission(TransmissionMap),
    Shadow(ShadowTriplet),
    Reflection(ImageBuffer),
    Watermark(WatermarkAsset),
}

impl ComponentAsset {
    fn kind_name(&self) -> &'static str {
        match self {
            ComponentAsset::Image(_) => "image",
            ComponentAsset::Mask(_) => "mask",
            ComponentAsset::Transmission(_) => "transmission",
            ComponentAsset::Shadow(_) => "shadow triplet",
            ComponentAsset::Reflection(_) => "reflection",
            ComponentAsset::Watermark(_) => "watermark",
        }
    }
}

/// Fixed (non-random) mixing configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixParams {
    pub mode: Mode,
    pub atmosphere_range: (f64, f64),
    pub raindrop: RaindropConfig,
    pub vignette_strength: f64,
}

impl MixParams {
    pub fn new(mode: Mode, width: usize, height: usize) -> Self {
        Self {
            mode,
            atmosphere_range: TRAIN_ATMOSPHERE_RANGE,
            raindrop: RaindropConfig::scaled_for(width, height),
            vignette_strength: DEFAULT_VIGNETTE_STRENGTH,
        }
    }
}

/// Everything drawn or fixed while mixing one sample, for the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampledParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub atmosphere: Option<f32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub haze_intensity: Option<HazeIntensity>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raindrop_rate: Option<f32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raindrop_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raindrop_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raindrop_blur: Option<BlurRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raindrop_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reflection_blur: Option<BlurRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vignette_strength: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlurRecord {
    pub kernel_px: usize,
    pub sigma: f64,
}

impl BlurRecord {
    fn for_kernel(kernel_px: usize) -> Self {
        Self {
            kernel_px,
            sigma: heuristic_sigma(kernel_px),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Composition {
    pub mixed: ImageBuffer,
    /// Clean base image for tasks that mix over one.
    pub background: Option<ImageBuffer>,
    /// Ground truth per selected component index.
    pub ground_truths: BTreeMap<usize, ImageBuffer>,
    pub params: SampledParams,
}

fn check_kind(spec: &ComponentSpec, asset: Option<&ComponentAsset>) -> Result<()> {
    use ComponentKind::*;
    match (spec.kind, asset) {
        (Raindrop, _)
        | (ImageDomain, Some(ComponentAsset::Image(_)))
        | (RainStreakMask | SnowMask, Some(ComponentAsset::Mask(_)))
        | (HazeTransmission, Some(ComponentAsset::Transmission(_)))
        | (ShadowPair, Some(ComponentAsset::Shadow(_)))
        | (ReflectionLayer, Some(ComponentAsset::Reflection(_)))
        | (Watermark, Some(ComponentAsset::Watermark(_))) => Ok(()),
        (_, None) => Err(Error::MissingAsset(format!("no asset for component `{}`", spec.name))),
        (_, Some(a)) => Err(Error::MissingAsset(format!(
            "component `{}` ({:?}) was given a {} asset",
            spec.name,
            spec.kind,
            a.kind_name()
        ))),
    }
}

/// Mixes the selected components of `case` in the policy's order.
///
/// Draws from `rng` in a fixed sequence: the atmospheric light first (tasks
/// with a base image), then per component in mixing order (raindrop geometry
/// and rate, reflection kernel).
#[allow(clippy::too_many_arguments)]
pub fn compose(
    task: Task,
    components: &[ComponentSpec],
    case: CaseMask,
    background: Option<&ImageBuffer>,
    assets: &BTreeMap<usize, ComponentAsset>,
    policy: &SelectionPolicy,
    params: &MixParams,
    rng: &mut Stream,
) -> Result<Composition> {
    if policy.n_components() != components.len() {
        return Err(Error::invalid(
            "policy",
            format!(
                "{} probabilities for {} components",
                policy.n_components(),
                components.len()
            ),
        ));
    }
    if case.indices().iter().any(|&i| i > components.len()) {
        return Err(Error::invalid(
            "case",
            format!("{case} selects beyond {} components", components.len()),
        ));
    }
    if let Some(required) = task.required_order() {
        if policy.mixing_order() != required {
            return Err(Error::invalid(
                "mixing_order",
                format!("{task} must mix in order {required:?}, got {:?}", policy.mixing_order()),
            ));
        }
    }
    for spec in components {
        let needed = case.contains(spec.index) || (task == Task::Task3 && spec.kind == ComponentKind::ShadowPair);
        if needed {
            check_kind(spec, assets.get(&spec.index))?;
        }
    }

    match task {
        Task::Task1 => compose_linear(case, assets, policy),
        Task::Task2a | Task::Task2b => {
            let base = background.ok_or_else(|| Error::MissingAsset("clean background image".into()))?;
            compose_weather(components, case, base, assets, policy, params, rng)
        }
        Task::Task3 => compose_overlay(components, case, assets, policy, params, rng),
    }
}

fn compose_linear(
    case: CaseMask,
    assets: &BTreeMap<usize, ComponentAsset>,
    policy: &SelectionPolicy,
) -> Result<Composition> {
    let mut selected = Vec::new();
    let mut ground_truths = BTreeMap::new();
    for &m in policy.mixing_order() {
        if !case.contains(m) {
            continue;
        }
        if let Some(ComponentAsset::Image(img)) = assets.get(&m) {
            selected.push(img);
            ground_truths.insert(m, img.clone());
        }
    }
    let mixed = linear_mix(&selected)?;
    Ok(Composition {
        mixed,
        background: None,
        ground_truths,
        params: SampledParams::default(),
    })
}

fn compose_weather(
    components: &[ComponentSpec],
    case: CaseMask,
    base: &ImageBuffer,
    assets: &BTreeMap<usize, ComponentAsset>,
    policy: &SelectionPolicy,
    params: &MixParams,
    rng: &mut Stream,
) -> Result<Composition> {
    let a = sample_atmosphere(rng, params.mode, params.atmosphere_range);
    let mut sampled = SampledParams {
        atmosphere: Some(a.0),
        ..SampledParams::default()
    };
    let mut current = base.clone();
    let mut ground_truths = BTreeMap::new();
    for &m in policy.mixing_order() {
        if !case.contains(m) {
            continue;
        }
        let spec = &components[m - 1];
        match (spec.kind, assets.get(&m)) {
            (ComponentKind::RainStreakMask | ComponentKind::SnowMask, Some(ComponentAsset::Mask(mask))) => {
                let kind = if spec.kind == ComponentKind::SnowMask {
                    MaskKind::Snow
                } else {
                    MaskKind::RainStreak
                };
                let layer = MaskLayer {
                    mask: mask.clone(),
                    kind,
                };
                current = apply_mask_composite(&current, &layer, a)?;
                ground_truths.insert(m, mask.clone());
            }
            (ComponentKind::HazeTransmission, Some(ComponentAsset::Transmission(t))) => {
                current = apply_haze(&current, t, a)?;
                sampled.haze_intensity = t.intensity;
                ground_truths.insert(m, t.t.clone());
            }
            (ComponentKind::Raindrop, _) => {
                let render = render_raindrops(&current, rng, &params.raindrop, params.mode)?;
                sampled.raindrop_rate = Some(render.rate);
                sampled.raindrop_count = Some(render.drops.len());
                sampled.raindrop_digest = Some(geometry_digest(&render.drops));
                sampled.raindrop_blur = Some(BlurRecord::for_kernel(BLUR_KERNEL));
                sampled.raindrop_gain = Some(params.raindrop.gain);
                current = render.image;
                ground_truths.insert(m, render.coverage);
            }
            (kind, _) => {
                return Err(Error::invalid(
                    "components",
                    format!("{kind:?} cannot be mixed by the weather models"),
                ))
            }
        }
    }
    Ok(Composition {
        mixed: current,
        background: Some(base.clone()),
        ground_truths,
        params: sampled,
    })
}

fn compose_overlay(
    components: &[ComponentSpec],
    case: CaseMask,
    assets: &BTreeMap<usize, ComponentAsset>,
    policy: &SelectionPolicy,
    params: &MixParams,
    rng: &mut Stream,
) -> Result<Composition> {
    let a = sample_atmosphere(rng, params.mode, params.atmosphere_range);
    let mut sampled = SampledParams {
        atmosphere: Some(a.0),
        ..SampledParams::default()
    };
    let triplet = components
        .iter()
        .find(|c| c.kind == ComponentKind::ShadowPair)
        .and_then(|c| match assets.get(&c.index) {
            Some(ComponentAsset::Shadow(t)) => Some(t),
            _ => None,
        })
        .ok_or_else(|| Error::MissingAsset("shadow triplet".into()))?;
    let mut current: Option<ImageBuffer> = None;
    let mut ground_truths = BTreeMap::new();
    for &m in policy.mixing_order() {
        let spec = &components[m - 1];
        if spec.kind == ComponentKind::ShadowPair {
            let (base, mask) = shadow_base(triplet, case.contains(m));
            if case.contains(m) {
                ground_truths.insert(m, mask);
            }
            current = Some(base);
            continue;
        }
        if !case.contains(m) {
            continue;
        }
        let img = current
            .as_ref()
            .ok_or_else(|| Error::invalid("mixing_order", "shadow base must be mixed first"))?;
        match assets.get(&m) {
            Some(ComponentAsset::Reflection(r)) => {
                let kernel_px = sample_reflection_kernel(rng, params.mode);
                let layer = ReflectionLayer {
                    image: r.clone(),
                    kernel_px,
                };
                let v = vignette_mask(img.width(), img.height(), params.vignette_strength);
                let contribution = reflection_contribution(&layer, &v)?;
                current = Some(apply_reflection(img, &layer, &v)?);
                sampled.reflection_blur = Some(BlurRecord::for_kernel(kernel_px));
                sampled.vignette_strength = Some(params.vignette_strength);
                ground_truths.insert(m, contribution);
            }
            Some(ComponentAsset::Watermark(wm)) => {
                current = Some(apply_watermark(img, wm, a)?);
                ground_truths.insert(m, wm.mask.clone());
            }
            _ => {
                return Err(Error::invalid(
                    "components",
                    format!("{:?} cannot be mixed by the overlay models", spec.kind),
                ))
            }
        }
    }
    Ok(Composition {
        mixed: current.ok_or_else(|| Error::MissingAsset("shadow triplet".into()))?,
        background: Some(triplet.shadow_free.clone()),
        ground_truths,
        params: sampled,
    })
}

/// The blurred, vignetted reflection that was added (recorded, not scored).
fn reflection_contribution(layer: &ReflectionLayer, v: &ImageBuffer) -> Result<ImageBuffer> {
    let blurred = gaussian_blur(&layer.image, layer.kernel_px, heuristic_sigma(layer.kernel_px))?;
    let ch = blurred.channels();
    Ok(ImageBuffer::from_fn(
        blurred.width(),
        blurred.height(),
        ch,
        |x, y, c| blurred.get(x, y, c) * v.get(x, y, 0),
    ))
}
