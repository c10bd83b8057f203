//! Deterministic core of the spike-replay engine.
//!
//! Everything in this crate is a pure function of its inputs: the spike
//! raster analysis, the dilated master clock, the three a-life ecologies,
//! the sound-control event compiler, the actuation mappers, and the wire
//! codec with its simulated synchronization harness. There is no IO, no
//! wall clock and no global state here; the companion `sn-engine` crate
//! supplies file formats, pacing, parallel drivers and the CLI.
//!
//! Determinism contract: every stochastic choice is drawn from the
//! counter-based generator in [`rng`], keyed by (seed, stream, entity,
//! step, draw). Results are therefore independent of thread count and
//! iteration order, which the engine relies on when it partitions agent
//! arrays across workers.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clock;
pub mod dataset;
pub mod ecology;
pub mod fabric;
pub mod rng;
pub mod sonify;
pub mod wire;

pub use clock::{Mode, PlaybackConfig, RowEvent, Schedule};
pub use dataset::{BurstIntervals, NeuronMeta, RateSeries, SpikeRaster};
pub use ecology::{Boid, PhysarumAgent, PhysarumSpecies, TermiteAgent, TrailField};
pub use sonify::{ControlEvent, EventKind, HarmonicState};
pub use wire::{OscArg, OscMessage, TopicMessage};
