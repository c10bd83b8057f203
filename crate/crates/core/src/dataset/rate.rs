use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::raster::SpikeRaster;

/// Windowed population firing rate, raw (spikes/second across all
/// channels) and normalized to the dataset maximum so replays see a
/// stable `[0, 1]` signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub window_ms: u32,
    pub raw: Vec<f64>,
    pub norm: Vec<f64>,
}

impl RateSeries {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Build a series directly from normalized values; raw is scaled by an
    /// arbitrary positive constant. Intended for tests and calibration
    /// drivers that need a planted signal.
    pub fn from_norm(window_ms: u32, norm: Vec<f64>) -> Self {
        let raw = norm.clone();
        Self { window_ms, raw, norm }
    }
}

/// Trailing-window population rate.
///
/// `raw[r]` sums spikes over rows `[max(0, r-window+1), r]` across all
/// channels and divides by the window length in seconds. A window longer
/// than the raster is clamped to the raster length (the divisor clamps
/// with it). `norm` divides by the series maximum, or is all zero for a
/// silent raster.
pub fn population_rate(raster: &SpikeRaster, window_ms: u32) -> RateSeries {
    let n = raster.n_rows();
    let window_rows = ((window_ms.max(1) as usize / raster.dt_ms() as usize).max(1)).min(n);
    let window_s = (window_rows * raster.dt_ms() as usize) as f64 / 1000.0;

    // Prefix sums keep the window sum exact in integer arithmetic.
    let mut prefix = vec![0u64; n + 1];
    for row in 0..n {
        prefix[row + 1] = prefix[row] + raster.count_in_row(row) as u64;
    }

    let mut raw = Vec::with_capacity(n);
    for row in 0..n {
        let lo = row + 1 - window_rows.min(row + 1);
        let in_window = prefix[row + 1] - prefix[lo];
        raw.push(in_window as f64 / window_s);
    }

    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    let norm = if max > 0.0 {
        raw.iter().map(|&v| v / max).collect()
    } else {
        vec![0.0; n]
    };

    RateSeries {
        window_ms: (window_rows * raster.dt_ms() as usize) as u32,
        raw,
        norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn silent_raster_is_flat_zero() {
        let raster = SpikeRaster::new(100, 4, 1).unwrap();
        let rate = population_rate(&raster, 10);
        assert!(rate.raw.iter().all(|&v| v == 0.0));
        assert!(rate.norm.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn saturated_raster_hits_full_rate() {
        // All 131 channels fire every row; with a 1000 ms window the rate
        // saturates at 131,000 spikes/s from row 999 on.
        let mut raster = SpikeRaster::new(1200, 131, 1).unwrap();
        for row in 0..1200 {
            for ch in 0..131 {
                raster.set(row, ch, true);
            }
        }
        let rate = population_rate(&raster, 1000);
        assert_eq!(rate.raw[999], 131_000.0);
        assert_eq!(rate.raw[1199], 131_000.0);
        assert_eq!(rate.norm[999], 1.0);
        // Earlier rows see a truncated window: fewer spikes over the same
        // nominal divisor.
        assert!(rate.raw[0] < rate.raw[999]);
    }

    #[test]
    fn single_spike_rectangular_response() {
        // One spike at (row 5, ch 0), window 10 ms: rows 5..=14 read
        // 1 spike / 0.01 s = 100 spikes/s, all other rows zero.
        let mut raster = SpikeRaster::new(30, 3, 1).unwrap();
        raster.set(5, 0, true);
        let rate = population_rate(&raster, 10);
        for (row, &v) in rate.raw.iter().enumerate() {
            if (5..=14).contains(&row) {
                assert_eq!(v, 100.0, "row {row}");
            } else {
                assert_eq!(v, 0.0, "row {row}");
            }
        }
        assert_eq!(rate.norm[5], 1.0);
    }

    #[test]
    fn oversized_window_clamps_to_raster() {
        let mut raster = SpikeRaster::new(10, 2, 1).unwrap();
        raster.set(0, 0, true);
        let rate = population_rate(&raster, 1_000_000);
        assert_eq!(rate.window_ms, 10);
        // Window covers the whole raster: every row sees the single spike.
        assert!(rate.raw.iter().all(|&v| v == 100.0));
    }

    proptest! {
        // Prepending w all-zero rows shifts raw right by w rows, exactly.
        #[test]
        fn shift_equivariance(
            rows in 1usize..60,
            w in 1usize..20,
            window in 1u32..40,
            spikes in proptest::collection::vec((0usize..60, 0usize..4), 0..40),
        ) {
            let mut base = SpikeRaster::new(rows, 4, 1).unwrap();
            for &(r, c) in &spikes {
                if r < rows {
                    base.set(r, c, true);
                }
            }
            let mut shifted = SpikeRaster::new(rows + w, 4, 1).unwrap();
            for &(r, c) in &spikes {
                if r < rows {
                    shifted.set(r + w, c, true);
                }
            }
            let a = population_rate(&base, window);
            let b = population_rate(&shifted, window);
            // Compare over rows where both windows are fully defined by the
            // same underlying data; clamping of the window at the raster
            // start only affects the new all-zero prefix.
            if window as usize <= rows {
                for r in 0..rows {
                    prop_assert_eq!(a.raw[r], b.raw[r + w], "row {}", r);
                }
            }
        }
    }
}
