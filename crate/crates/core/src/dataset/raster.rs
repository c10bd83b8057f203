use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Binary spike matrix, bit-packed row-major into 64-bit words.
///
/// Channel `c` of row `r` lives at bit `c % 64` of word
/// `r * words_per_row + c / 64` (LSB first). Rows are padded to whole
/// words; padding bits are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeRaster {
    n_rows: usize,
    n_channels: usize,
    dt_ms: u32,
    words_per_row: usize,
    bits: Vec<u64>,
}

/// Per-channel metadata: a unit-square position and the backbone flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronMeta {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub is_backbone: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RasterError {
    ZeroDimension,
    ZeroDt,
    ChannelOutOfRange { channel: usize, n_channels: usize },
    RowOutOfRange { row: usize, n_rows: usize },
}

impl fmt::Display for RasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RasterError::ZeroDimension => write!(f, "raster dimensions must be at least 1x1"),
            RasterError::ZeroDt => write!(f, "dt_ms must be positive"),
            RasterError::ChannelOutOfRange { channel, n_channels } => {
                write!(f, "channel {channel} out of range ({n_channels} channels)")
            }
            RasterError::RowOutOfRange { row, n_rows } => {
                write!(f, "row {row} out of range ({n_rows} rows)")
            }
        }
    }
}

impl core::error::Error for RasterError {}

impl SpikeRaster {
    pub fn new(n_rows: usize, n_channels: usize, dt_ms: u32) -> Result<Self, RasterError> {
        if n_rows == 0 || n_channels == 0 {
            return Err(RasterError::ZeroDimension);
        }
        if dt_ms == 0 {
            return Err(RasterError::ZeroDt);
        }
        let words_per_row = n_channels.div_ceil(64);
        Ok(Self {
            n_rows,
            n_channels,
            dt_ms,
            words_per_row,
            bits: vec![0u64; n_rows * words_per_row],
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn dt_ms(&self) -> u32 {
        self.dt_ms
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn set(&mut self, row: usize, channel: usize, spike: bool) {
        debug_assert!(row < self.n_rows && channel < self.n_channels);
        let word = row * self.words_per_row + channel / 64;
        let mask = 1u64 << (channel % 64);
        if spike {
            self.bits[word] |= mask;
        } else {
            self.bits[word] &= !mask;
        }
    }

    #[inline]
    pub fn get(&self, row: usize, channel: usize) -> bool {
        debug_assert!(row < self.n_rows && channel < self.n_channels);
        let word = row * self.words_per_row + channel / 64;
        (self.bits[word] >> (channel % 64)) & 1 == 1
    }

    /// The packed words of one row.
    #[inline]
    pub fn row_words(&self, row: usize) -> &[u64] {
        let base = row * self.words_per_row;
        &self.bits[base..base + self.words_per_row]
    }

    /// Number of spikes in one row across all channels.
    #[inline]
    pub fn count_in_row(&self, row: usize) -> u32 {
        self.row_words(row).iter().map(|w| w.count_ones()).sum()
    }

    /// Channels spiking in `row`, ascending.
    pub fn spikes_in_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let words = self.row_words(row);
        words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }

    pub fn total_spikes(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Spike count per channel.
    pub fn channel_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_channels];
        for row in 0..self.n_rows {
            for ch in self.spikes_in_row(row) {
                counts[ch] += 1;
            }
        }
        counts
    }

    /// Spike counts binned over `bin_rows` consecutive rows, per channel.
    /// Returns (n_bins, counts) with counts indexed `[ch * n_bins + bin]`.
    pub fn binned_counts(&self, bin_rows: usize) -> (usize, Vec<f64>) {
        let bin_rows = bin_rows.max(1);
        let n_bins = self.n_rows.div_ceil(bin_rows);
        let mut counts = vec![0.0f64; self.n_channels * n_bins];
        for row in 0..self.n_rows {
            let bin = row / bin_rows;
            for ch in self.spikes_in_row(row) {
                counts[ch * n_bins + bin] += 1.0;
            }
        }
        (n_bins, counts)
    }

    /// Raw packed words, row-major. Exposed for the binary file format.
    pub fn words(&self) -> &[u64] {
        &self.bits
    }
}

pub(crate) fn validate_channel(channel: usize, n_channels: usize) -> Result<(), RasterError> {
    if channel >= n_channels {
        Err(RasterError::ChannelOutOfRange { channel, n_channels })
    } else {
        Ok(())
    }
}
