use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::raster::{NeuronMeta, SpikeRaster};
use crate::rng::CounterRng;

// Stream ids under the dataset seed.
const STREAM_RATE: u64 = 1;
const STREAM_POS: u64 = 2;
const STREAM_PICK: u64 = 3;
const STREAM_SPIKE: u64 = 4;
const STREAM_SHARED: u64 = 5;

/// Synthetic raster recipe. The generated data has per-channel Poisson
/// background activity, population-wide burst windows with a rate
/// multiplier, and a planted backbone group that fires in lock-step
/// inside bursts so the correlation criterion can recover it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_rows: usize,
    pub n_channels: usize,
    /// Per-channel background rate drawn uniformly from this range (Hz).
    pub background_hz: (f64, f64),
    pub n_bursts: usize,
    pub burst_rate_multiplier: f64,
    pub burst_len_ms: usize,
    pub backbone_k: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        // Burst strength is sized so that a 1000 ms rate window still puts
        // the inter-burst baseline below the default hysteresis low
        // threshold, while total added spikes stay a small fraction of the
        // background mass.
        Self {
            seed: 7,
            n_rows: 180_000,
            n_channels: 131,
            background_hz: (0.5, 3.0),
            n_bursts: 6,
            burst_rate_multiplier: 8.0,
            burst_len_ms: 500,
            backbone_k: 27,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthError {
    BackboneExceedsChannels { backbone_k: usize, n_channels: usize },
    ZeroDimension,
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::BackboneExceedsChannels { backbone_k, n_channels } => {
                write!(f, "backbone_k {backbone_k} exceeds n_channels {n_channels}")
            }
            SynthError::ZeroDimension => write!(f, "n_rows and n_channels must be at least 1"),
        }
    }
}

impl core::error::Error for SynthError {}

/// Burst windows, evenly spaced with the window centered in each segment.
pub fn burst_windows(spec: &SynthSpec) -> Vec<(usize, usize)> {
    let mut windows = Vec::with_capacity(spec.n_bursts);
    if spec.n_bursts == 0 || spec.burst_len_ms == 0 {
        return windows;
    }
    let segment = spec.n_rows / (spec.n_bursts + 1);
    for i in 0..spec.n_bursts {
        let center = (i + 1) * segment;
        let half = spec.burst_len_ms / 2;
        let start = center.saturating_sub(half);
        let end = (start + spec.burst_len_ms).min(spec.n_rows);
        if start < end {
            windows.push((start, end));
        }
    }
    windows
}

/// Generate a synthetic raster and its metadata. Deterministic for a
/// fixed spec; every random choice is keyed by (seed, stream, entity,
/// row) so the output is independent of generation order.
pub fn gen_synthetic(spec: &SynthSpec) -> Result<(SpikeRaster, Vec<NeuronMeta>), SynthError> {
    if spec.n_rows == 0 || spec.n_channels == 0 {
        return Err(SynthError::ZeroDimension);
    }
    if spec.backbone_k > spec.n_channels {
        return Err(SynthError::BackboneExceedsChannels {
            backbone_k: spec.backbone_k,
            n_channels: spec.n_channels,
        });
    }

    let (lo, hi) = spec.background_hz;
    let rates: Vec<f64> = (0..spec.n_channels)
        .map(|ch| CounterRng::new(spec.seed, STREAM_RATE, ch as u64, 0).range_f64(lo, hi))
        .collect();

    // Pick backbone channels by a seeded partial Fisher-Yates shuffle.
    let mut ids: Vec<usize> = (0..spec.n_channels).collect();
    let mut pick = CounterRng::new(spec.seed, STREAM_PICK, 0, 0);
    for i in 0..spec.backbone_k {
        let j = i + pick.below((spec.n_channels - i) as u64) as usize;
        ids.swap(i, j);
    }
    let mut is_backbone = alloc::vec![false; spec.n_channels];
    for &id in &ids[..spec.backbone_k] {
        is_backbone[id] = true;
    }

    let meta: Vec<NeuronMeta> = (0..spec.n_channels)
        .map(|ch| {
            let mut r = CounterRng::new(spec.seed, STREAM_POS, ch as u64, 0);
            NeuronMeta {
                id: ch as u32,
                x: r.next_f64(),
                y: r.next_f64(),
                is_backbone: is_backbone[ch],
            }
        })
        .collect();

    let windows = burst_windows(spec);
    let mut in_burst = alloc::vec![false; spec.n_rows];
    for &(s, e) in &windows {
        for flag in &mut in_burst[s..e] {
            *flag = true;
        }
    }

    // Lock-step probability inside bursts for the backbone group: the
    // multiplier applied to the midpoint of the background range.
    let mid = 0.5 * (lo + hi);
    let p_shared = (spec.burst_rate_multiplier * mid / 1000.0).clamp(0.0, 1.0);

    let mut raster = SpikeRaster::new(spec.n_rows, spec.n_channels, 1)
        .map_err(|_| SynthError::ZeroDimension)?;
    for row in 0..spec.n_rows {
        let shared_fire = if in_burst[row] && spec.backbone_k > 0 {
            CounterRng::new(spec.seed, STREAM_SHARED, 0, row as u64).next_bool(p_shared)
        } else {
            false
        };
        for ch in 0..spec.n_channels {
            let fire = if in_burst[row] {
                if is_backbone[ch] {
                    shared_fire
                } else {
                    let p = (rates[ch] * spec.burst_rate_multiplier / 1000.0).clamp(0.0, 1.0);
                    CounterRng::new(spec.seed, STREAM_SPIKE, ch as u64, row as u64).next_bool(p)
                }
            } else {
                let p = rates[ch] / 1000.0;
                p > 0.0
                    && CounterRng::new(spec.seed, STREAM_SPIKE, ch as u64, row as u64).next_bool(p)
            };
            if fire {
                raster.set(row, ch, true);
            }
        }
    }

    Ok((raster, meta))
}
