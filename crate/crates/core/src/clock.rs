//! Master playback clock.
//!
//! Maps raster rows onto a dilated simulated timeline and emits the
//! ordered row-event stream every other subsystem consumes. Simulated
//! time is carried as integer microseconds: the per-row duration is
//! computed once and each event's timestamp is a single multiplication,
//! so there is no floating accumulation and no drift over a full replay.
//!
//! The schedule itself is pure; real-time pacing (sleeping toward
//! absolute deadlines) lives in the engine crate and consumes the same
//! iterator, which is what makes offline and realtime replays emit
//! identical `(row, t_sim, seq)` sequences.

use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Offline,
    Realtime,
}

/// Playback window and pacing parameters.
///
/// `passes` only applies when `loop_enabled` is set; a non-looping replay
/// always runs exactly one pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaybackConfig {
    pub dilation: f64,
    pub start_row: u32,
    /// Exclusive end row.
    pub end_row: u32,
    pub loop_enabled: bool,
    pub passes: u32,
    pub mode: Mode,
}

impl Default for PlaybackConfig {
    fn default() -> Self {
        Self {
            dilation: 30.0,
            start_row: 0,
            end_row: 180_000,
            loop_enabled: false,
            passes: 1,
            mode: Mode::Offline,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClockError {
    NonPositiveDilation(f64),
    EmptyWindow { start_row: u32, end_row: u32 },
    EndBeyondRaster { end_row: u32, n_rows: u32 },
    ZeroPasses,
}

impl fmt::Display for ClockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClockError::NonPositiveDilation(d) => write!(f, "dilation must be > 0 (got {d})"),
            ClockError::EmptyWindow { start_row, end_row } => {
                write!(f, "start_row {start_row} must be below end_row {end_row}")
            }
            ClockError::EndBeyondRaster { end_row, n_rows } => {
                write!(f, "end_row {end_row} exceeds raster rows {n_rows}")
            }
            ClockError::ZeroPasses => write!(f, "looped playback needs at least one pass"),
        }
    }
}

impl core::error::Error for ClockError {}

impl PlaybackConfig {
    pub fn validate(&self, n_rows: u32) -> Result<(), ClockError> {
        if !(self.dilation > 0.0) {
            return Err(ClockError::NonPositiveDilation(self.dilation));
        }
        if self.start_row >= self.end_row {
            return Err(ClockError::EmptyWindow {
                start_row: self.start_row,
                end_row: self.end_row,
            });
        }
        if self.end_row > n_rows {
            return Err(ClockError::EndBeyondRaster {
                end_row: self.end_row,
                n_rows,
            });
        }
        if self.loop_enabled && self.passes == 0 {
            return Err(ClockError::ZeroPasses);
        }
        Ok(())
    }

    pub fn rows_per_pass(&self) -> u32 {
        self.end_row - self.start_row
    }

    pub fn effective_passes(&self) -> u32 {
        if self.loop_enabled {
            self.passes
        } else {
            1
        }
    }
}

/// Dilated duration of one raster row.
pub fn row_duration_us(dilation: f64, dt_ms: u32) -> u64 {
    libm::round(dt_ms as f64 * 1000.0 * dilation) as u64
}

pub fn row_duration_ms(dilation: f64, dt_ms: u32) -> f64 {
    row_duration_us(dilation, dt_ms) as f64 / 1000.0
}

/// One tick of the master clock.
///
/// `seq` increases monotonically across the whole replay, including loop
/// passes; `row` and `t_sim_us` restart each pass and `pass` tells them
/// apart in downstream logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowEvent {
    pub seq: u64,
    pub pass: u32,
    pub row: u32,
    pub t_sim_us: u64,
}

impl RowEvent {
    pub fn t_sim_ms(&self) -> f64 {
        self.t_sim_us as f64 / 1000.0
    }
}

/// Pure row-event schedule; identical in offline and realtime modes.
#[derive(Debug, Clone)]
pub struct Schedule {
    start_row: u32,
    rows_per_pass: u32,
    passes: u32,
    row_dur_us: u64,
    next: u64,
    total: u64,
}

impl Schedule {
    pub fn new(config: &PlaybackConfig, dt_ms: u32, n_rows: u32) -> Result<Self, ClockError> {
        config.validate(n_rows)?;
        let rows_per_pass = config.rows_per_pass();
        let passes = config.effective_passes();
        Ok(Self {
            start_row: config.start_row,
            rows_per_pass,
            passes,
            row_dur_us: row_duration_us(config.dilation, dt_ms),
            next: 0,
            total: rows_per_pass as u64 * passes as u64,
        })
    }

    pub fn row_duration_us(&self) -> u64 {
        self.row_dur_us
    }

    pub fn total_events(&self) -> u64 {
        self.total
    }
}

impl Iterator for Schedule {
    type Item = RowEvent;

    fn next(&mut self) -> Option<RowEvent> {
        if self.next >= self.total {
            return None;
        }
        let seq = self.next;
        self.next += 1;
        let pass = (seq / self.rows_per_pass as u64) as u32;
        let offset = (seq % self.rows_per_pass as u64) as u32;
        Some(RowEvent {
            seq,
            pass,
            row: self.start_row + offset,
            t_sim_us: offset as u64 * self.row_dur_us,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Schedule {}
