use serde::{Deserialize, Serialize};

use super::boids::BoidsParams;
use super::physarum::PhysarumSpecies;

/// Affine response of one parameter to the normalized firing rate:
/// `from` at rate 0, `to` at rate 1. `from > to` gives an inverse
/// response; outputs never leave the `[from, to]` (or `[to, from]`)
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub from: f64,
    pub to: f64,
}

impl Span {
    pub const fn new(from: f64, to: f64) -> Self {
        Self { from, to }
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        let v = self.from + (self.to - self.from) * r;
        let (lo, hi) = if self.from <= self.to {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        };
        v.clamp(lo, hi)
    }
}

/// How the firing rate steers the trail-follower species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysarumModulation {
    pub sensor_angle: Span,
    pub sensor_offset: Span,
    pub step_size: Span,
    pub rotation_angle: Span,
}

impl Default for PhysarumModulation {
    fn default() -> Self {
        Self {
            sensor_angle: Span::new(11.25f64.to_radians(), 45.0f64.to_radians()),
            sensor_offset: Span::new(3.0, 15.0),
            step_size: Span::new(0.5, 2.0),
            rotation_angle: Span::new(22.5f64.to_radians(), 90.0f64.to_radians()),
        }
    }
}

/// How the firing rate steers the flock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoidsModulation {
    pub w_coh: Span,
    pub w_sep: Span,
    pub w_ali: Span,
    pub max_speed: Span,
}

impl Default for BoidsModulation {
    fn default() -> Self {
        Self {
            w_coh: Span::new(0.005, 0.05),
            w_sep: Span::new(0.15, 0.45),
            w_ali: Span::new(0.02, 0.1),
            max_speed: Span::new(1.5, 4.0),
        }
    }
}

/// Full modulation map: per-parameter affine responses plus the spike
/// perturbation gain for the flock cohorts.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulationMap {
    pub physarum: PhysarumModulation,
    pub boids: BoidsModulation,
    pub spike: SpikeGains,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpikeGains {
    /// Heading rotation per spike for the mapped boid cohort (radians).
    pub boid_heading_kick: f64,
}

impl Default for SpikeGains {
    fn default() -> Self {
        Self {
            boid_heading_kick: 0.3,
        }
    }
}

/// Parameter values produced for one tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatedParams {
    pub sensor_angle: f64,
    pub sensor_offset: f64,
    pub step_size: f64,
    pub rotation_angle: f64,
    pub w_coh: f64,
    pub w_sep: f64,
    pub w_ali: f64,
    pub max_speed: f64,
    /// True when the input rate fell outside [0, 1] and was clamped; the
    /// caller is expected to log this once.
    pub clamped: bool,
}

/// Evaluate the map at a normalized rate. Out-of-range rates are clamped
/// and reported through [`ModulatedParams::clamped`].
pub fn modulate(r_norm: f64, map: &ModulationMap) -> ModulatedParams {
    let clamped = !(0.0..=1.0).contains(&r_norm);
    let r = r_norm.clamp(0.0, 1.0);
    ModulatedParams {
        sensor_angle: map.physarum.sensor_angle.at(r),
        sensor_offset: map.physarum.sensor_offset.at(r),
        step_size: map.physarum.step_size.at(r),
        rotation_angle: map.physarum.rotation_angle.at(r),
        w_coh: map.boids.w_coh.at(r),
        w_sep: map.boids.w_sep.at(r),
        w_ali: map.boids.w_ali.at(r),
        max_speed: map.boids.max_speed.at(r),
        clamped,
    }
}

impl ModulatedParams {
    /// Species params for this tick, keeping the per-species deposit and
    /// population.
    pub fn apply_physarum(&self, base: &PhysarumSpecies) -> PhysarumSpecies {
        PhysarumSpecies {
            sensor_angle: self.sensor_angle,
            sensor_offset: self.sensor_offset.max(1.0),
            step_size: self.step_size,
            rotation_angle: self.rotation_angle,
            deposit: base.deposit,
            count: base.count,
        }
    }

    /// Flock params for this tick, keeping geometry and force limits.
    pub fn apply_boids(&self, base: &BoidsParams) -> BoidsParams {
        BoidsParams {
            w_coh: self.w_coh,
            w_sep: self.w_sep,
            w_ali: self.w_ali,
            max_speed: self.max_speed,
            ..*base
        }
    }
}
