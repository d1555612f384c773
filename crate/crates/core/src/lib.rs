//! Synthesis and scoring for blind image decomposition benchmarks.
//!
//! A mixed image is built from an arbitrary non-empty subset of `N` source
//! components using a task-specific mixing function (linear average,
//! weather imaging models, lens raindrops, or shadow/reflection/watermark
//! overlays). Every sample records its case, parameters and ground truths in
//! a JSON-lines manifest, and is a pure function of the master seed and the
//! asset directories.

pub mod demo;
pub mod error;
pub mod eval;
pub mod imgcore;
pub mod linmix;
pub mod manifest;
pub mod metrics;
pub mod overlay;
pub mod preview;
pub mod raindrop;
pub mod rng;
pub mod scenario;
pub mod synth;
pub mod weather;

pub use error::{Error, Result};
pub use imgcore::{ImageBuffer, LabBuffer};
pub use manifest::MixManifest;
pub use metrics::{MetricReport, PredictionVector};
pub use rng::{derive_stream, Stream};
pub use scenario::{CaseMask, ComponentKind, ComponentSpec, SelectionPolicy, Task};
pub use synth::{RunConfig, SynthSummary};
pub use weather::Mode;
