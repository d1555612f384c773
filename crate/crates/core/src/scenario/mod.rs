//! Component registry, case enumeration and sampling, and ordered composition.

mod compose;

pub use crate::rng::derive_stream;
pub use compose::{compose, ComponentAsset, Composition, MixParams, SampledParams};

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

pub const MAX_COMPONENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    ImageDomain,
    RainStreakMask,
    SnowMask,
    HazeTransmission,
    Raindrop,
    ShadowPair,
    ReflectionLayer,
    Watermark,
}

impl ComponentKind {
    /// Whether the component's ground truth is a reconstruction target when
    /// scoring. Reflection layers are mixed but never scored.
    pub fn is_scored(self) -> bool {
        !matches!(self, ComponentKind::ReflectionLayer)
    }
}

/// One source component `X_m` of a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    /// 1-based index.
    pub index: usize,
    pub name: String,
    pub kind: ComponentKind,
    pub asset_dir: Option<PathBuf>,
    pub selection_prob: f64,
}

/// The set of selected components; bit `m - 1` is component `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CaseMask(u32);

impl CaseMask {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 {
            return Err(Error::invalid("case", "a case selects at least one component"));
        }
        Ok(Self(bits))
    }

    /// Builds a mask from 1-based component indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_COMPONENTS {
                return Err(Error::invalid("case", format!("component index {i} out of range")));
            }
            bits |= 1 << (i - 1);
        }
        Self::new(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Number of selected components, `L`.
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        (1..=32).contains(&index) && self.0 & (1 << (index - 1)) != 0
    }

    /// Selected 1-based indices, ascending.
    pub fn indices(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    /// Letter label: component 1 is `a`, 2 is `b`, and so on.
    pub fn label(self) -> String {
        self.indices()
            .into_iter()
            .map(|i| (b'a' + (i - 1) as u8) as char)
            .collect()
    }

    pub fn parse_label(label: &str) -> Result<Self> {
        let indices: Vec<usize> = label
            .chars()
            .map(|c| {
                if c.is_ascii_lowercase() {
                    Ok((c as u8 - b'a') as usize + 1)
                } else {
                    Err(Error::invalid("case", format!("bad label character {c:?}")))
                }
            })
            .collect::<Result<_>>()?;
        Self::from_indices(&indices)
    }
}

impl fmt::Display for CaseMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All `2^n - 1` non-empty cases, ordered by size then numeric value.
pub fn enumerate_cases(n: usize) -> Result<Vec<CaseMask>> {
    if !(2..=MAX_COMPONENTS).contains(&n) {
        return Err(Error::invalid("n", format!("must be in 2..={MAX_COMPONENTS}, got {n}")));
    }
    let mut cases: Vec<CaseMask> = (1..(1u32 << n)).map(CaseMask).collect();
    cases.sort_by_key(|c| (c.len(), c.bits()));
    Ok(cases)
}

/// Inclusion probabilities and the order in which selected components are mixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    probs: Vec<f64>,
    mixing_order: Vec<usize>,
}

impl SelectionPolicy {
    /// `mixing_order` holds 1-based component indices and must be a permutation.
    pub fn new(probs: Vec<f64>, mixing_order: Vec<usize>) -> Result<Self> {
        let n = probs.len();
        if n == 0 || n > MAX_COMPONENTS {
            return Err(Error::invalid("probs", format!("need 1..={MAX_COMPONENTS} components")));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid("probs", format!("probability {p} outside [0, 1]")));
        }
        if probs.iter().all(|&p| p == 0.0) {
            return Err(Error::invalid("probs", "at least one probability must be positive"));
        }
        let mut sorted = mixing_order.clone();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::invalid(
                "mixing_order",
                format!("{mixing_order:?} is not a permutation of 1..={n}"),
            ));
        }
        Ok(Self { probs, mixing_order })
    }

    /// Mixing in index order.
    pub fn in_index_order(probs: Vec<f64>) -> Result<Self> {
        let order = (1..=probs.len()).collect();
        Self::new(probs, order)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mixing_order(&self) -> &[usize] {
        &self.mixing_order
    }

    pub fn n_components(&self) -> usize {
        self.probs.len()
    }
}

/// Draws each component independently; an empty draw is redrawn.
pub fn sample_case(policy: &SelectionPolicy, rng: &mut Stream) -> CaseMask {
    loop {
        let mut bits = 0u32;
        for (m, &p) in policy.probs.iter().enumerate() {
            if rng.bernoulli(p) {
                bits |= 1 << m;
            }
        }
        if bits != 0 {
            return CaseMask(bits);
        }
    }
}

/// The benchmark tasks with their component registries and default policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Linear mixture of `N` image domains.
    Task1,
    /// Deraining in driving: streak, snow, haze, raindrop over a clean scene.
    Task2a,
    /// Deraining in general: streak, snow, raindrop.
    Task2b,
    /// Shadow, reflection and watermark over a shadow-free photo.
    Task3,
}

impl Task {
    /// Components of the fixed-registry tasks, in index order.
    pub fn registry(self) -> &'static [(&'static str, ComponentKind)] {
        use ComponentKind::*;
        match self {
            Task::Task1 => &[],
            Task::Task2a => &[
                ("rain_streak", RainStreakMask),
                ("snow", SnowMask),
                ("haze", HazeTransmission),
                ("raindrop", Raindrop),
            ],
            Task::Task2b => &[
                ("rain_streak", RainStreakMask),
                ("snow", SnowMask),
                ("raindrop", Raindrop),
            ],
            Task::Task3 => &[
                ("shadow", ShadowPair),
                ("reflection", ReflectionLayer),
                ("watermark", Watermark),
            ],
        }
    }

    /// Default inclusion probabilities. For the linear-mix task these depend
    /// on `n`: 0.9, 0.8, 0.7, 0.6, 0.5, 0.5, 0.5 for `n` = 2..=8, 0.5 beyond.
    pub fn default_probs(self, n: usize) -> Vec<f64> {
        match self {
            Task::Task1 => {
                let p = match n {
                    2 => 0.9,
                    3 => 0.8,
                    4 => 0.7,
                    5 => 0.6,
                    _ => 0.5,
                };
                vec![p; n]
            }
            Task::Task2a => vec![1.0, 0.5, 0.5, 0.5],
            Task::Task2b => vec![0.6, 0.5, 0.5],
            Task::Task3 => vec![0.6, 0.5, 0.5],
        }
    }

    pub fn default_policy(self, n: usize) -> Result<SelectionPolicy> {
        SelectionPolicy::in_index_order(self.default_probs(n))
    }

    /// Whether the task mixes over a clean base image that is itself a target.
    pub fn has_background(self) -> bool {
        !matches!(self, Task::Task1)
    }

    /// Mixing order the task requires regardless of policy, if any.
    pub fn required_order(self) -> Option<&'static [usize]> {
        match self {
            Task::Task3 => Some(&[1, 2, 3]),
            _ => None,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Task1 => "task1",
            Task::Task2a => "task2a",
            Task::Task2b => "task2b",
            Task::Task3 => "task3",
        })
    }
}
