use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::raster::{NeuronMeta, SpikeRaster};

/// Bin width for the correlation criterion, in milliseconds.
const CORR_BIN_MS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackboneError {
    KOutOfRange { k: usize, n_channels: usize },
    NoBackbone,
}

impl fmt::Display for BackboneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackboneError::KOutOfRange { k, n_channels } => {
                write!(f, "backbone count {k} out of range 1..={n_channels}")
            }
            BackboneError::NoBackbone => write!(f, "no backbone neurons flagged"),
        }
    }
}

impl core::error::Error for BackboneError {}

/// Rank channels by summed pairwise Pearson correlation of 10 ms binned
/// spike counts and return the top `k` channel ids in rank order
/// (strongest first). Ties break toward the lower channel id; channels
/// with zero variance contribute zero correlation.
pub fn select_backbone(raster: &SpikeRaster, k: usize) -> Result<Vec<u32>, BackboneError> {
    let n_ch = raster.n_channels();
    if k == 0 || k > n_ch {
        return Err(BackboneError::KOutOfRange { k, n_channels: n_ch });
    }

    let bin_rows = (CORR_BIN_MS / raster.dt_ms() as usize).max(1);
    let (n_bins, counts) = raster.binned_counts(bin_rows);

    // Standardize each channel over bins; zero-variance channels become a
    // zero vector so their correlations vanish.
    let mut z = vec![0.0f64; n_ch * n_bins];
    for ch in 0..n_ch {
        let row = &counts[ch * n_bins..(ch + 1) * n_bins];
        let mean = row.iter().sum::<f64>() / n_bins as f64;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n_bins as f64;
        if var > 0.0 {
            let inv_sd = 1.0 / libm::sqrt(var);
            let dst = &mut z[ch * n_bins..(ch + 1) * n_bins];
            for (d, &v) in dst.iter_mut().zip(row) {
                *d = (v - mean) * inv_sd;
            }
        }
    }

    let mut score = vec![0.0f64; n_ch];
    for a in 0..n_ch {
        let za = &z[a * n_bins..(a + 1) * n_bins];
        for b in (a + 1)..n_ch {
            let zb = &z[b * n_bins..(b + 1) * n_bins];
            let dot: f64 = za.iter().zip(zb).map(|(&x, &y)| x * y).sum();
            let corr = dot / n_bins as f64;
            score[a] += corr;
            score[b] += corr;
        }
    }

    let mut ranked: Vec<u32> = (0..n_ch as u32).collect();
    ranked.sort_by(|&a, &b| {
        score[b as usize]
            .partial_cmp(&score[a as usize])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    ranked.truncate(k);
    Ok(ranked)
}

/// Apply a backbone ranking to the metadata flags: exactly the ranked ids
/// are flagged.
pub fn apply_backbone_flags(meta: &mut [NeuronMeta], ranked: &[u32]) {
    for m in meta.iter_mut() {
        m.is_backbone = false;
    }
    for &id in ranked {
        if let Some(m) = meta.get_mut(id as usize) {
            m.is_backbone = true;
        }
    }
}

/// Gaussian spatial density of backbone activity plus a 75th-percentile
/// mask of the dense interaction zones.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneMap {
    pub width: usize,
    pub height: usize,
    pub density: Vec<f64>,
    pub mask: Vec<bool>,
}

impl ZoneMap {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.density[y * self.width + x]
    }

    #[inline]
    pub fn masked(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }
}

/// Accumulate, per grid cell, the spike-count-weighted Gaussian kernels
/// of all backbone neurons, then mask cells above the 75th percentile of
/// the nonzero density values.
pub fn backbone_zones(
    meta: &[NeuronMeta],
    raster: &SpikeRaster,
    grid_w: usize,
    grid_h: usize,
    sigma: f64,
) -> Result<ZoneMap, BackboneError> {
    let backbone: Vec<&NeuronMeta> = meta.iter().filter(|m| m.is_backbone).collect();
    if backbone.is_empty() {
        return Err(BackboneError::NoBackbone);
    }

    let counts = raster.channel_counts();
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let mut density = vec![0.0f64; grid_w * grid_h];
    for m in &backbone {
        let weight = counts[m.id as usize] as f64;
        if weight == 0.0 {
            continue;
        }
        for gy in 0..grid_h {
            let cy = (gy as f64 + 0.5) / grid_h as f64;
            for gx in 0..grid_w {
                let cx = (gx as f64 + 0.5) / grid_w as f64;
                let d2 = (cx - m.x) * (cx - m.x) + (cy - m.y) * (cy - m.y);
                density[gy * grid_w + gx] += weight * libm::exp(-d2 * inv_two_sigma_sq);
            }
        }
    }

    let mut nonzero: Vec<f64> = density.iter().cloned().filter(|&v| v > 0.0).collect();
    let mask = if nonzero.is_empty() {
        vec![false; grid_w * grid_h]
    } else {
        nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = (nonzero.len() * 3) / 4;
        let threshold = nonzero[idx.min(nonzero.len() - 1)];
        density.iter().map(|&v| v > threshold).collect()
    };

    Ok(ZoneMap {
        width: grid_w,
        height: grid_h,
        density,
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::{gen_synthetic, SynthSpec};
    use crate::rng::CounterRng;

    #[test]
    fn k_equal_n_flags_all() {
        let mut raster = SpikeRaster::new(100, 5, 1).unwrap();
        for row in 0..100 {
            raster.set(row, row % 5, true);
        }
        let ranked = select_backbone(&raster, 5).unwrap();
        let mut ids = ranked.clone();
        ids.sort_unstable();
        assert_eq!(ids, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn k_out_of_range_rejected() {
        let raster = SpikeRaster::new(10, 3, 1).unwrap();
        assert!(select_backbone(&raster, 0).is_err());
        assert!(select_backbone(&raster, 4).is_err());
    }

    #[test]
    fn planted_lockstep_group_recovered() {
        let spec = SynthSpec {
            seed: 77,
            n_rows: 60_000,
            n_channels: 40,
            backbone_k: 9,
            ..SynthSpec::default()
        };
        let (raster, meta) = gen_synthetic(&spec).unwrap();
        let planted: Vec<u32> = meta
            .iter()
            .filter(|m| m.is_backbone)
            .map(|m| m.id)
            .collect();
        let mut ranked = select_backbone(&raster, 9).unwrap();
        ranked.sort_unstable();
        let mut expect = planted.clone();
        expect.sort_unstable();
        assert_eq!(ranked, expect);
    }

    #[test]
    fn permutation_consistency() {
        // Permuting channels permutes the selected set identically.
        let n_ch = 12;
        let n_rows = 4000;
        let mut rng = CounterRng::new(5, 0, 0, 0);
        let mut base = SpikeRaster::new(n_rows, n_ch, 1).unwrap();
        for row in 0..n_rows {
            for ch in 0..n_ch {
                // Dense, channel-biased fill so scores are distinct.
                if rng.next_bool(0.1 + 0.4 * (ch as f64 / n_ch as f64)) {
                    base.set(row, ch, true);
                }
            }
        }
        // A fixed permutation.
        let perm: Vec<usize> = (0..n_ch).map(|i| (i * 5 + 3) % n_ch).collect();
        let mut permuted = SpikeRaster::new(n_rows, n_ch, 1).unwrap();
        for row in 0..n_rows {
            for ch in base.spikes_in_row(row).collect::<Vec<_>>() {
                permuted.set(row, perm[ch], true);
            }
        }
        let k = 4;
        let mut a: Vec<u32> = select_backbone(&base, k)
            .unwrap()
            .iter()
            .map(|&id| perm[id as usize] as u32)
            .collect();
        let mut b = select_backbone(&permuted, k).unwrap();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn single_backbone_blob_is_centered() {
        let mut raster = SpikeRaster::new(100, 1, 1).unwrap();
        for row in 0..100 {
            raster.set(row, 0, true);
        }
        let meta = vec![NeuronMeta {
            id: 0,
            x: 0.5,
            y: 0.5,
            is_backbone: true,
        }];
        let zones = backbone_zones(&meta, &raster, 16, 16, 0.05).unwrap();
        // Midpoint cells carry the peak.
        let peak = zones
            .density
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(zones.at(8, 8) >= peak * 0.999 || zones.at(7, 7) >= peak * 0.999);
        assert!(zones.masked(8, 8) || zones.masked(7, 7));
        // Far corner must be unmasked.
        assert!(!zones.masked(0, 0));
    }

    #[test]
    fn equal_twin_blobs_have_equal_mass() {
        let mut raster = SpikeRaster::new(100, 2, 1).unwrap();
        for row in 0..100 {
            raster.set(row, 0, true);
            raster.set(row, 1, true);
        }
        let meta = vec![
            NeuronMeta { id: 0, x: 0.25, y: 0.5, is_backbone: true },
            NeuronMeta { id: 1, x: 0.75, y: 0.5, is_backbone: true },
        ];
        let zones = backbone_zones(&meta, &raster, 32, 32, 0.04).unwrap();
        // Split masked mass by the vertical midline.
        let mut left = 0.0;
        let mut right = 0.0;
        for y in 0..32 {
            for x in 0..32 {
                if zones.masked(x, y) {
                    if x < 16 {
                        left += zones.at(x, y);
                    } else {
                        right += zones.at(x, y);
                    }
                }
            }
        }
        assert!(left > 0.0 && right > 0.0);
        let rel = (left - right).abs() / left.max(right);
        assert!(rel < 0.01, "mass imbalance {rel}");
        // The two blobs are disjoint: nothing masked on the midline band.
        for y in 0..32 {
            assert!(!zones.masked(15, y) && !zones.masked(16, y));
        }
    }

    #[test]
    fn silent_raster_empty_mask() {
        let raster = SpikeRaster::new(50, 1, 1).unwrap();
        let meta = vec![NeuronMeta { id: 0, x: 0.5, y: 0.5, is_backbone: true }];
        let zones = backbone_zones(&meta, &raster, 8, 8, 0.05).unwrap();
        assert!(zones.density.iter().all(|&v| v == 0.0));
        assert!(zones.mask.iter().all(|&m| !m));
    }

    #[test]
    fn no_backbone_is_an_error() {
        let raster = SpikeRaster::new(10, 1, 1).unwrap();
        let meta = vec![NeuronMeta { id: 0, x: 0.5, y: 0.5, is_backbone: false }];
        assert_eq!(
            backbone_zones(&meta, &raster, 8, 8, 0.05),
            Err(BackboneError::NoBackbone)
        );
    }
}
