//! Spike raster ingestion and analysis.
//!
//! The driving dataset is a binary spike matrix (one row per millisecond,
//! one column per neuron channel) plus per-neuron metadata. From it this
//! module derives the three signals every other subsystem consumes: the
//! windowed population firing rate, the burst boundaries, and the backbone
//! channel ranking.

mod backbone;
mod bursts;
mod raster;
mod rate;
mod synth;

pub use backbone::{backbone_zones, select_backbone, BackboneError, ZoneMap};
pub use bursts::{detect_bursts, BurstIntervals, BurstParams, BurstParamError};
pub use raster::{NeuronMeta, RasterError, SpikeRaster};
pub use rate::{population_rate, RateSeries};
pub use synth::{gen_synthetic, SynthError, SynthSpec};
