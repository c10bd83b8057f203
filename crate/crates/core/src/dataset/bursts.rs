use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::rate::RateSeries;

/// Detected burst windows as `(start_row, end_row)` pairs with an
/// exclusive end: the end row is the first row after the burst, so a
/// burst running to the end of the data closes at `n_rows`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BurstIntervals {
    pub intervals: Vec<(u32, u32)>,
}

impl BurstIntervals {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Two-threshold hysteresis extractor parameters. Thresholds are
/// fractions of the normalized rate maximum; durations are milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstParams {
    pub theta_hi: f64,
    pub theta_lo: f64,
    pub min_dur_ms: u32,
    pub min_gap_ms: u32,
}

impl Default for BurstParams {
    fn default() -> Self {
        Self {
            theta_hi: 0.5,
            theta_lo: 0.25,
            min_dur_ms: 50,
            min_gap_ms: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstParamError {
    pub theta_hi: f64,
    pub theta_lo: f64,
}

impl fmt::Display for BurstParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "burst thresholds must satisfy 0 <= lo < hi <= 1 (got lo={}, hi={})",
            self.theta_lo, self.theta_hi
        )
    }
}

impl core::error::Error for BurstParamError {}

/// Hysteresis burst detection over the normalized rate.
///
/// A burst opens at the first row with `norm >= theta_hi` and closes at
/// the first row of a run of at least `min_gap` consecutive rows with
/// `norm < theta_lo`. Shorter dips do not close the burst. Bursts shorter
/// than `min_dur` are discarded. A burst still open at the end of the
/// data closes at the pending dip start if one is in progress, otherwise
/// at `n_rows`.
pub fn detect_bursts(
    rate: &RateSeries,
    params: &BurstParams,
    dt_ms: u32,
) -> Result<BurstIntervals, BurstParamError> {
    if !(0.0..=1.0).contains(&params.theta_lo)
        || !(0.0..=1.0).contains(&params.theta_hi)
        || params.theta_lo >= params.theta_hi
    {
        return Err(BurstParamError {
            theta_hi: params.theta_hi,
            theta_lo: params.theta_lo,
        });
    }

    let dt = dt_ms.max(1) as usize;
    let min_dur_rows = (params.min_dur_ms as usize).div_ceil(dt).max(1);
    let min_gap_rows = (params.min_gap_ms as usize).div_ceil(dt).max(1);

    let mut intervals = Vec::new();
    let mut open: Option<usize> = None; // start row of the open burst
    let mut dip: Option<(usize, usize)> = None; // (first row below lo, run length)

    let mut close = |intervals: &mut Vec<(u32, u32)>, start: usize, end: usize| {
        if end > start && end - start >= min_dur_rows {
            intervals.push((start as u32, end as u32));
        }
    };

    for (row, &v) in rate.norm.iter().enumerate() {
        match open {
            None => {
                if v >= params.theta_hi {
                    open = Some(row);
                    dip = None;
                }
            }
            Some(start) => {
                if v < params.theta_lo {
                    let (first, run) = dip.map_or((row, 1), |(f, r)| (f, r + 1));
                    if run >= min_gap_rows {
                        close(&mut intervals, start, first);
                        open = None;
                        dip = None;
                    } else {
                        dip = Some((first, run));
                    }
                } else {
                    dip = None;
                }
            }
        }
    }

    if let Some(start) = open {
        let end = dip.map_or(rate.norm.len(), |(first, _)| first);
        close(&mut intervals, start, end);
    }

    Ok(BurstIntervals { intervals })
}
