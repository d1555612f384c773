//! Batch dataset generation: asset indexing, per-sample synthesis and the
//! on-disk layout.
//!
//! Layout under the output root:
//!
//! ```text
//! manifest.jsonl
//! mixed/<id>.png
//! gt/<id>.background.png      (tasks with a clean base image)
//! gt/<id>.<component>.png     (one per selected component)
//! ```
//!
//! Asset directories hold 8-bit PNGs, listed in byte order of their file
//! names. Haze directories may split maps into `light/`, `moderate/` and
//! `heavy/`; the shadow directory holds `shadow/`, `shadow_free/` and `mask/`
//! with matching file names; the watermark directory holds `rgb/` and
//! `mask/` with matching file names.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imgcore::{augment_with, load_image, resize_bilinear, save_image, AugmentDraw, AugmentParams, ImageBuffer};
use crate::manifest::{sample_id, write_manifests, GroundTruthEntry, MixManifest, BACKGROUND_NAME};
use crate::overlay::{ShadowTriplet, WatermarkAsset};
use crate::raindrop::RaindropConfig;
use crate::rng::{derive_stream, lanes, Stream};
use crate::scenario::{
    compose, sample_case, CaseMask, ComponentAsset, ComponentKind, ComponentSpec, MixParams, SelectionPolicy, Task,
    MAX_COMPONENTS,
};
use crate::weather::{HazeIntensity, Mode, TransmissionMap};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

fn default_mode() -> Mode {
    Mode::Test
}

fn default_size() -> usize {
    256
}

/// Asset directory of one component. Components without assets (raindrops)
/// may omit `dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSource {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

/// A case to generate instead of sampling one; sample `i` uses entry
/// `i % cases.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedCase {
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haze: Option<HazeIntensity>,
}

/// A synthesis run, usually read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub master_seed: u64,
    pub samples: u64,
    /// Side of the square output images.
    #[serde(default = "default_size")]
    pub size: usize,
    pub output: PathBuf,
    /// Clean scenes for the weather tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background_dir: Option<PathBuf>,
    /// Components in index order for the linear-mix task; for the other
    /// tasks the asset directory of each registry component by name.
    #[serde(default)]
    pub components: Vec<ComponentSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing_order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<FixedCase>>,
    /// Haze tier used whenever haze is selected; drawn uniformly over the
    /// available tiers when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haze_intensity: Option<HazeIntensity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atmosphere_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raindrop: Option<RaindropConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vignette_strength: Option<f64>,
    /// Random resize-crop-flip of every loaded asset.
    #[serde(default)]
    pub augment: bool,
}

impl RunConfig {
    /// Reads a JSON config; relative paths are resolved against the file's
    /// directory.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output);
        if let Some(p) = self.background_dir.as_mut() {
            fix(p);
        }
        for c in &mut self.components {
            if let Some(p) = c.dir.as_mut() {
                fix(p);
            }
        }
    }
}

/// Counts reported after a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub samples: u64,
    pub ground_truths: usize,
    /// Samples per case label.
    pub cases: BTreeMap<String, u64>,
    pub manifest: PathBuf,
}

/// Sorted PNG file names directly inside `dir`.
pub fn list_pngs(dir: &Path) -> Result<Vec<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::MissingAsset(format!("{}: {e}", dir.display())))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                names.push(name.to_string());
            }
        }
    }
    if names.is_empty() {
        return Err(Error::MissingAsset(format!("no PNG files in {}", dir.display())));
    }
    names.sort();
    Ok(names)
}

/// Names present in `base` that also exist in every sibling directory.
fn list_paired(root: &Path, base: &str, others: &[&str]) -> Result<Vec<String>> {
    let names = list_pngs(&root.join(base))?;
    for other in others {
        for n in &names {
            let p = root.join(other).join(n);
            if !p.is_file() {
                return Err(Error::MissingAsset(format!("{} has no counterpart {}", n, p.display())));
            }
        }
    }
    Ok(names)
}

#[derive(Debug, Clone)]
enum AssetFiles {
    None,
    Flat(Vec<String>),
    HazeTiers(BTreeMap<HazeIntensity, Vec<String>>),
    Triplet(Vec<String>),
    Watermark(Vec<String>),
}

#[derive(Debug, Clone)]
struct IndexedComponent {
    spec: ComponentSpec,
    files: AssetFiles,
}

/// Everything a run needs, validated once up front.
#[derive(Debug, Clone)]
pub struct SynthPlan {
    config: RunConfig,
    components: Vec<IndexedComponent>,
    background: Option<(PathBuf, Vec<String>)>,
    policy: SelectionPolicy,
    params: MixParams,
    fixed_cases: Vec<(CaseMask, Option<HazeIntensity>)>,
}

/// One generated sample before it is written.
#[derive(Debug, Clone)]
pub struct GeneratedSample {
    pub manifest: MixManifest,
    pub mixed: ImageBuffer,
    pub background: Option<ImageBuffer>,
    /// Ground truths by component name.
    pub ground_truths: Vec<(String, ImageBuffer)>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != BACKGROUND_NAME
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl SynthPlan {
    pub fn new(config: RunConfig) -> Result<Self> {
        if config.size == 0 {
            return Err(Error::invalid("size", "must be positive"));
        }
        if config.task == Task::Task3 && config.size < 2 {
            return Err(Error::invalid("size", "too small"));
        }
        let specs = component_specs(&config)?;
        let n = specs.len();
        let probs = config.probs.clone().unwrap_or_else(|| config.task.default_probs(n));
        let order = config.mixing_order.clone().unwrap_or_else(|| (1..=n).collect());
        let policy = SelectionPolicy::new(probs, order)?;
        if policy.n_components() != n {
            return Err(Error::invalid(
                "probs",
                format!("{} values for {n} components", policy.n_components()),
            ));
        }
        if let Some(required) = config.task.required_order() {
            if policy.mixing_order() != required {
                return Err(Error::invalid(
                    "mixing_order",
                    format!("{} must mix in order {required:?}", config.task),
                ));
            }
        }
        let specs: Vec<ComponentSpec> = specs
            .into_iter()
            .zip(policy.probs())
            .map(|(s, &p)| ComponentSpec { selection_prob: p, ..s })
            .collect();

        let mut components = Vec::with_capacity(n);
        for spec in specs {
            let files = index_component(&spec)?;
            components.push(IndexedComponent { spec, files });
        }
        let background = if matches!(config.task, Task::Task2a | Task::Task2b) {
            let dir = config
                .background_dir
                .clone()
                .ok_or_else(|| Error::MissingAsset("background_dir is required for this task".into()))?;
            let names = list_pngs(&dir)?;
            Some((dir, names))
        } else {
            None
        };

        let mut fixed_cases = Vec::new();
        for fc in config.cases.iter().flatten() {
            let mut indices = Vec::new();
            for name in &fc.components {
                let c = components
                    .iter()
                    .find(|c| &c.spec.name == name)
                    .ok_or_else(|| Error::invalid("cases", format!("unknown component `{name}`")))?;
                indices.push(c.spec.index);
            }
            let case = CaseMask::from_indices(&indices)?;
            if fc.haze.is_some()
                && !components
                    .iter()
                    .any(|c| c.spec.kind == ComponentKind::HazeTransmission)
            {
                return Err(Error::invalid("cases", "haze intensity given but the task has no haze"));
            }
            fixed_cases.push((case, fc.haze));
        }
        if config.cases.as_ref().is_some_and(|c| c.is_empty()) {
            return Err(Error::invalid("cases", "must not be empty when given"));
        }

        let mut params = MixParams::new(config.mode, config.size, config.size);
        if let Some(r) = config.atmosphere_range {
            params.atmosphere_range = r;
        }
        if let Some(rd) = &config.raindrop {
            rd.validate()?;
            params.raindrop = rd.clone();
        }
        if let Some(v) = config.vignette_strength {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid("vignette_strength", "must lie in [0, 1]"));
            }
            params.vignette_strength = v;
        }

        Ok(Self {
            config,
            components,
            background,
            policy,
            params,
            fixed_cases,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn policy(&self) -> &SelectionPolicy {
        &self.policy
    }

    pub fn component_specs(&self) -> Vec<ComponentSpec> {
        self.components.iter().map(|c| c.spec.clone()).collect()
    }

    fn augment_params(&self) -> AugmentParams {
        let size = self.config.size;
        AugmentParams {
            load_size: (size * 286 + 128) / 256,
            crop_size: size,
            ..AugmentParams::default()
        }
    }

    fn prepare(&self, img: ImageBuffer, rng: &mut Stream, draw: &mut Option<AugmentDraw>) -> Result<ImageBuffer> {
        let size = self.config.size;
        if self.config.augment {
            let params = self.augment_params();
            let d = *draw.get_or_insert_with(|| AugmentDraw::sample(&params, rng));
            Ok(augment_with(&img, &params, d))
        } else if img.width() == size && img.height() == size {
            Ok(img)
        } else {
            resize_bilinear(&img, size, size)
        }
    }

    fn load_rgb(&self, path: &Path, rng: &mut Stream, draw: &mut Option<AugmentDraw>) -> Result<ImageBuffer> {
        let img = load_image(path)?.to_rgb();
        self.prepare(img, rng, draw)
    }

    fn load_gray(&self, path: &Path, rng: &mut Stream, draw: &mut Option<AugmentDraw>) -> Result<ImageBuffer> {
        let img = load_image(path)?.to_luma();
        self.prepare(img, rng, draw)
    }

    /// Synthesizes sample `index` in memory. A pure function of the plan and
    /// the index.
    pub fn generate(&self, index: u64) -> Result<GeneratedSample> {
        let seed = self.config.master_seed;
        let mut case_rng = derive_stream(seed, index, lanes::CASE);
        let mut asset_rng = derive_stream(seed, index, lanes::ASSETS);
        let mut aug_rng = derive_stream(seed, index, lanes::AUGMENT);
        let mut compose_rng = derive_stream(seed, index, lanes::COMPOSE);

        let (case, fixed_haze) = if self.fixed_cases.is_empty() {
            (sample_case(&self.policy, &mut case_rng), None)
        } else {
            self.fixed_cases[(index % self.fixed_cases.len() as u64) as usize]
        };

        let mut sources = BTreeMap::new();
        let background = match &self.background {
            Some((dir, names)) => {
                let name = &names[asset_rng.below(names.len() as u64) as usize];
                sources.insert(BACKGROUND_NAME.to_string(), name.clone());
                let mut draw = None;
                Some(self.load_rgb(&dir.join(name), &mut aug_rng, &mut draw)?)
            }
            None => None,
        };

        let mut assets = BTreeMap::new();
        for comp in &self.components {
            let spec = &comp.spec;
            let needed = case.contains(spec.index)
                || (self.config.task == Task::Task3 && spec.kind == ComponentKind::ShadowPair);
            if !needed {
                continue;
            }
            let dir = spec.asset_dir.as_deref();
            let mut draw = None;
            let pick = |names: &Vec<String>, rng: &mut Stream| names[rng.below(names.len() as u64) as usize].clone();
            let asset = match (&comp.files, dir) {
                (AssetFiles::None, _) | (_, None) => continue,
                (AssetFiles::Flat(names), Some(dir)) => {
                    let name = pick(names, &mut asset_rng);
                    let path = dir.join(&name);
                    sources.insert(spec.name.clone(), name);
                    match spec.kind {
                        ComponentKind::ImageDomain => {
                            ComponentAsset::Image(self.load_rgb(&path, &mut aug_rng, &mut draw)?)
                        }
                        ComponentKind::RainStreakMask | ComponentKind::SnowMask => {
                            ComponentAsset::Mask(self.load_gray(&path, &mut aug_rng, &mut draw)?)
                        }
                        ComponentKind::HazeTransmission => {
                            if let Some(tier) = fixed_haze.or(self.config.haze_intensity) {
                                return Err(Error::MissingAsset(format!(
                                    "{} has no {} subdirectory",
                                    dir.display(),
                                    tier.as_str()
                                )));
                            }
                            ComponentAsset::Transmission(TransmissionMap {
                                t: self.load_gray(&path, &mut aug_rng, &mut draw)?,
                                intensity: None,
                            })
                        }
                        ComponentKind::ReflectionLayer => {
                            ComponentAsset::Reflection(self.load_rgb(&path, &mut aug_rng, &mut draw)?)
                        }
                        kind => {
                            return Err(Error::invalid(
                                "components",
                                format!("{kind:?} needs a structured asset directory"),
                            ))
                        }
                    }
                }
                (AssetFiles::HazeTiers(tiers), Some(dir)) => {
                    let tier = match fixed_haze.or(self.config.haze_intensity) {
                        Some(t) => t,
                        None => {
                            let available: Vec<HazeIntensity> = tiers.keys().copied().collect();
                            available[asset_rng.below(available.len() as u64) as usize]
                        }
                    };
                    let names = tiers.get(&tier).ok_or_else(|| {
                        Error::MissingAsset(format!("{} has no {} subdirectory", dir.display(), tier.as_str()))
                    })?;
                    let name = pick(names, &mut asset_rng);
                    let rel = format!("{}/{}", tier.as_str(), name);
                    let t = self.load_gray(&dir.join(&rel), &mut aug_rng, &mut draw)?;
                    sources.insert(spec.name.clone(), rel);
                    ComponentAsset::Transmission(TransmissionMap {
                        t,
                        intensity: Some(tier),
                    })
                }
                (AssetFiles::Triplet(names), Some(dir)) => {
                    let name = pick(names, &mut asset_rng);
                    let shadow = self.load_rgb(&dir.join("shadow").join(&name), &mut aug_rng, &mut draw)?;
                    let free = self.load_rgb(&dir.join("shadow_free").join(&name), &mut aug_rng, &mut draw)?;
                    let mask = self
                        .load_gray(&dir.join("mask").join(&name), &mut aug_rng, &mut draw)?
                        .map(|v| if v > 0.5 { 1.0 } else { 0.0 });
                    sources.insert(spec.name.clone(), name);
                    ComponentAsset::Shadow(ShadowTriplet::new(shadow, free, mask)?)
                }
                (AssetFiles::Watermark(names), Some(dir)) => {
                    let name = pick(names, &mut asset_rng);
                    let rgb = self.load_rgb(&dir.join("rgb").join(&name), &mut aug_rng, &mut draw)?;
                    let mask = self.load_gray(&dir.join("mask").join(&name), &mut aug_rng, &mut draw)?;
                    sources.insert(spec.name.clone(), name);
                    ComponentAsset::Watermark(WatermarkAsset::new(rgb, mask)?)
                }
            };
            assets.insert(spec.index, asset);
        }

        let specs = self.component_specs();
        let composition = compose(
            self.config.task,
            &specs,
            case,
            background.as_ref(),
            &assets,
            &self.policy,
            &self.params,
            &mut compose_rng,
        )?;

        let id = sample_id(index);
        let mut ground_truths = Vec::new();
        let mut entries = Vec::new();
        for (&m, img) in &composition.ground_truths {
            let spec = &specs[m - 1];
            entries.push(GroundTruthEntry {
                index: m,
                name: spec.name.clone(),
                kind: spec.kind,
                path: format!("gt/{id}.{}.png", spec.name),
            });
            ground_truths.push((spec.name.clone(), img.clone()));
        }
        let manifest = MixManifest {
            sample_id: id.clone(),
            sample_index: index,
            master_seed: seed,
            task: self.config.task,
            mode: self.config.mode,
            size: self.config.size,
            augment: self.config.augment,
            components: specs.iter().map(|s| s.name.clone()).collect(),
            case,
            case_label: case.label(),
            probs: self.policy.probs().to_vec(),
            mixing_order: self.policy.mixing_order().to_vec(),
            sources,
            params: composition.params,
            mixed: format!("mixed/{id}.png"),
            background: composition
                .background
                .as_ref()
                .map(|_| format!("gt/{id}.{BACKGROUND_NAME}.png")),
            ground_truths: entries,
        };
        Ok(GeneratedSample {
            manifest,
            mixed: composition.mixed,
            background: composition.background,
            ground_truths,
        })
    }

    /// Writes one sample's PNGs under `root` and returns its manifest.
    pub fn write_sample(&self, root: &Path, index: u64) -> Result<MixManifest> {
        let sample = self.generate(index)?;
        let m = &sample.manifest;
        save_image(&sample.mixed, root.join(&m.mixed))?;
        if let (Some(img), Some(rel)) = (&sample.background, &m.background) {
            save_image(img, root.join(rel))?;
        }
        for ((_, img), entry) in sample.ground_truths.iter().zip(&m.ground_truths) {
            save_image(img, root.join(&entry.path))?;
        }
        Ok(sample.manifest)
    }

    /// Generates every sample on `workers` threads and writes the manifest.
    /// Output bytes do not depend on `workers`.
    pub fn run(&self, workers: usize) -> Result<SynthSummary> {
        let root = &self.config.output;
        fs::create_dir_all(root.join("mixed")).map_err(|e| Error::io(root.join("mixed"), e))?;
        fs::create_dir_all(root.join("gt")).map_err(|e| Error::io(root.join("gt"), e))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        let results: Vec<Result<MixManifest>> = pool.install(|| {
            (0..self.config.samples)
                .into_par_iter()
                .map(|i| self.write_sample(root, i))
                .collect()
        });
        let manifests = results.into_iter().collect::<Result<Vec<_>>>()?;
        let manifest_path = root.join(MANIFEST_FILE);
        write_manifests(&manifest_path, &manifests)?;
        let mut cases = BTreeMap::new();
        for m in &manifests {
            *cases.entry(m.case_label.clone()).or_insert(0) += 1;
        }
        log::info!("wrote {} samples to {}", manifests.len(), root.display());
        Ok(SynthSummary {
            samples: manifests.len() as u64,
            ground_truths: manifests.iter().map(|m| m.ground_truths.len()).sum(),
            cases,
            manifest: manifest_path,
        })
    }
}

/// Validates `config` and generates the dataset it describes.
pub fn run_synth(config: &RunConfig, workers: usize) -> Result<SynthSummary> {
    SynthPlan::new(config.clone())?.run(workers)
}

fn component_specs(config: &RunConfig) -> Result<Vec<ComponentSpec>> {
    let mut seen = std::collections::BTreeSet::new();
    for c in &config.components {
        if !valid_name(&c.name) {
            return Err(Error::invalid("components", format!("bad component name `{}`", c.name)));
        }
        if !seen.insert(c.name.as_str()) {
            return Err(Error::invalid("components", format!("`{}` listed twice", c.name)));
        }
    }
    let spec = |index: usize, name: &str, kind: ComponentKind, dir: Option<PathBuf>| ComponentSpec {
        index,
        name: name.to_string(),
        kind,
        asset_dir: dir,
        selection_prob: 0.0,
    };
    match config.task {
        Task::Task1 => {
            let n = config.components.len();
            if !(2..=MAX_COMPONENTS).contains(&n) {
                return Err(Error::invalid(
                    "components",
                    format!("need 2..={MAX_COMPONENTS} image domains, got {n}"),
                ));
            }
            Ok(config
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| spec(i + 1, &c.name, ComponentKind::ImageDomain, c.dir.clone()))
                .collect())
        }
        task => {
            let registry = task.registry();
            for c in &config.components {
                if !registry.iter().any(|(name, _)| *name == c.name) {
                    return Err(Error::invalid(
                        "components",
                        format!("{task} has no component `{}`", c.name),
                    ));
                }
            }
            Ok(registry
                .iter()
                .enumerate()
                .map(|(i, (name, kind))| {
                    let dir = config
                        .components
                        .iter()
                        .find(|c| c.name == *name)
                        .and_then(|c| c.dir.clone());
                    spec(i + 1, name, *kind, dir)
                })
                .collect())
        }
    }
}

fn index_component(spec: &ComponentSpec) -> Result<AssetFiles> {
    if spec.kind == ComponentKind::Raindrop {
        return Ok(AssetFiles::None);
    }
    let dir = spec
        .asset_dir
        .as_deref()
        .ok_or_else(|| Error::MissingAsset(format!("no asset directory for component `{}`", spec.name)))?;
    if !dir.is_dir() {
        return Err(Error::MissingAsset(format!("{} is not a directory", dir.display())));
    }
    match spec.kind {
        ComponentKind::HazeTransmission => {
            let mut tiers = BTreeMap::new();
            for tier in HazeIntensity::ALL {
                let sub = dir.join(tier.as_str());
                if sub.is_dir() {
                    tiers.insert(tier, list_pngs(&sub)?);
                }
            }
            if tiers.is_empty() {
                Ok(AssetFiles::Flat(list_pngs(dir)?))
            } else {
                Ok(AssetFiles::HazeTiers(tiers))
            }
        }
        ComponentKind::ShadowPair => Ok(AssetFiles::Triplet(list_paired(
            dir,
            "shadow",
            &["shadow_free", "mask"],
        )?)),
        ComponentKind::Watermark => Ok(AssetFiles::Watermark(list_paired(dir, "rgb", &["mask"])?)),
        _ => Ok(AssetFiles::Flat(list_pngs(dir)?)),
    }
}
