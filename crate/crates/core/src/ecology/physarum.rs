use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::field::{wrap_coord, TrailField};
use crate::rng::CounterRng;

const STREAM_PHYSARUM: u64 = 0x7E02;

/// Per-species sense/move constants of the trail-following model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysarumSpecies {
    /// Angular offset of the side sensors (radians), in (0, pi).
    pub sensor_angle: f64,
    /// Sensor distance ahead (cells), at least 1.
    pub sensor_offset: f64,
    /// Cells advanced per step.
    pub step_size: f64,
    /// Rotation applied toward the winning sensor (radians).
    pub rotation_angle: f64,
    /// Trail units deposited per agent per step.
    pub deposit: f64,
    pub count: usize,
}

impl Default for PhysarumSpecies {
    fn default() -> Self {
        Self {
            sensor_angle: 22.5f64.to_radians(),
            sensor_offset: 9.0,
            step_size: 1.0,
            rotation_angle: 45.0f64.to_radians(),
            deposit: 5.0,
            count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysarumAgent {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Read-only weighted view over the species trail fields: what one
/// species perceives is the coupling-weighted sum of every field.
pub struct CombinedField<'a> {
    fields: &'a [TrailField],
    weights: &'a [f64],
}

impl<'a> CombinedField<'a> {
    pub fn new(fields: &'a [TrailField], weights: &'a [f64]) -> Self {
        debug_assert_eq!(fields.len(), weights.len());
        Self { fields, weights }
    }

    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for (field, &w) in self.fields.iter().zip(self.weights) {
            if w != 0.0 {
                acc += w * field.sample(x, y);
            }
        }
        acc
    }
}

/// Seeded uniform spawn for one species.
pub fn spawn_physarum(
    count: usize,
    species_idx: usize,
    width: usize,
    height: usize,
    seed: u64,
) -> Vec<PhysarumAgent> {
    (0..count)
        .map(|i| {
            let entity = agent_entity(species_idx, i);
            let mut rng = CounterRng::new(seed, STREAM_PHYSARUM, entity, u64::MAX);
            PhysarumAgent {
                x: rng.range_f64(0.0, width as f64),
                y: rng.range_f64(0.0, height as f64),
                heading: rng.range_f64(0.0, core::f64::consts::TAU),
            }
        })
        .collect()
}

#[inline]
fn agent_entity(species_idx: usize, agent_idx: usize) -> u64 {
    ((species_idx as u64) << 40) | agent_idx as u64
}

/// Advance a slice of one species' agents by one tick: sense the combined
/// field at front/left/right, rotate toward the strongest sample (random
/// turn when the front sample is strictly weakest), move, and count a
/// deposit into the agent's landing cell.
///
/// `base_idx` is the global index of `agents[0]` within the species, so
/// random draws stay tied to agent identity no matter how the caller
/// partitions the array. `deposit_counts` is a `width*height` buffer the
/// caller merges across workers by integer addition.
#[allow(clippy::too_many_arguments)]
pub fn step_physarum_slice(
    agents: &mut [PhysarumAgent],
    base_idx: usize,
    species_idx: usize,
    params: &PhysarumSpecies,
    sensed: &CombinedField<'_>,
    width: usize,
    height: usize,
    seed: u64,
    tick: u64,
    deposit_counts: &mut [u32],
) {
    debug_assert_eq!(deposit_counts.len(), width * height);
    let w = width as f64;
    let h = height as f64;
    for (offset, agent) in agents.iter_mut().enumerate() {
        let entity = agent_entity(species_idx, base_idx + offset);
        let mut rng = CounterRng::new(seed, STREAM_PHYSARUM, entity, tick);

        let probe = |angle: f64| {
            sensed.sample(
                agent.x + params.sensor_offset * libm::cos(angle),
                agent.y + params.sensor_offset * libm::sin(angle),
            )
        };
        let front = probe(agent.heading);
        let left = probe(agent.heading - params.sensor_angle);
        let right = probe(agent.heading + params.sensor_angle);

        if front > left && front > right {
            // keep heading
        } else if front < left && front < right {
            let sign = if rng.next_bool(0.5) { 1.0 } else { -1.0 };
            agent.heading += sign * params.rotation_angle;
        } else if left > right {
            agent.heading -= params.rotation_angle;
        } else if right > left {
            agent.heading += params.rotation_angle;
        }

        agent.x = wrap_coord(agent.x + params.step_size * libm::cos(agent.heading), w);
        agent.y = wrap_coord(agent.y + params.step_size * libm::sin(agent.heading), h);

        let cx = (agent.x as usize).min(width - 1);
        let cy = (agent.y as usize).min(height - 1);
        deposit_counts[cy * width + cx] += 1;
    }
}

/// Default cross-species coupling: own trail attracts at full weight,
/// other species' trails at a mild positive weight.
pub fn default_coupling(n_species: usize, own: f64, other: f64) -> Vec<Vec<f64>> {
    (0..n_species)
        .map(|s| {
            (0..n_species)
                .map(|t| if s == t { own } else { other })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn field_with(width: usize, height: usize) -> TrailField {
        TrailField::new(width, height).unwrap()
    }

    #[test]
    fn uniform_field_goes_straight() {
        let mut field = field_with(64, 64);
        for v in field.values_mut() {
            *v = 3.0;
        }
        let fields = vec![field];
        let weights = vec![1.0];
        let sensed = CombinedField::new(&fields, &weights);
        let mut agents = vec![PhysarumAgent { x: 10.0, y: 32.0, heading: 0.0 }];
        let mut counts = vec![0u32; 64 * 64];
        for tick in 0..10 {
            step_physarum_slice(
                &mut agents, 0, 0, &PhysarumSpecies::default(), &sensed, 64, 64, 1, tick,
                &mut counts,
            );
        }
        assert_eq!(agents[0].heading, 0.0);
        assert!((agents[0].x - 20.0).abs() < 1e-9);
        assert_eq!(agents[0].y, 32.0);
    }

    #[test]
    fn left_probe_dominance_turns_left() {
        // Trail only under the left probe: heading decreases by exactly
        // rotation_angle.
        let params = PhysarumSpecies::default();
        let agent = PhysarumAgent { x: 32.0, y: 32.0, heading: 0.0 };
        let mut field = field_with(64, 64);
        let lx = agent.x + params.sensor_offset * libm::cos(-params.sensor_angle);
        let ly = agent.y + params.sensor_offset * libm::sin(-params.sensor_angle);
        let (cx, cy) = field.cell_of(lx, ly);
        field.set(cx, cy, 10.0);
        let fields = vec![field];
        let weights = vec![1.0];
        let sensed = CombinedField::new(&fields, &weights);
        let mut agents = vec![agent];
        let mut counts = vec![0u32; 64 * 64];
        step_physarum_slice(
            &mut agents, 0, 0, &params, &sensed, 64, 64, 5, 0, &mut counts,
        );
        assert!(
            (agents[0].heading + params.rotation_angle).abs() < 1e-12,
            "heading {}",
            agents[0].heading
        );
    }

    #[test]
    fn every_agent_deposits_once_per_step() {
        let field = field_with(32, 32);
        let fields = vec![field];
        let weights = vec![1.0];
        let sensed = CombinedField::new(&fields, &weights);
        let mut agents = spawn_physarum(500, 0, 32, 32, 4);
        let mut counts = vec![0u32; 32 * 32];
        step_physarum_slice(
            &mut agents, 0, 0,
            &PhysarumSpecies { count: 500, ..PhysarumSpecies::default() },
            &sensed, 32, 32, 4, 0, &mut counts,
        );
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        assert_eq!(total, 500);
    }

    #[test]
    fn split_stepping_matches_whole_stepping() {
        // Partitioning the agent array must not change any agent or any
        // deposit count.
        let field = field_with(48, 48);
        let fields = vec![field];
        let weights = vec![1.0];
        let sensed = CombinedField::new(&fields, &weights);
        let params = PhysarumSpecies::default();

        let spawned = spawn_physarum(301, 0, 48, 48, 11);
        let mut whole = spawned.clone();
        let mut whole_counts = vec![0u32; 48 * 48];
        step_physarum_slice(&mut whole, 0, 0, &params, &sensed, 48, 48, 11, 3, &mut whole_counts);

        let mut split = spawned;
        let mut split_counts = vec![0u32; 48 * 48];
        let (a, rest) = split.split_at_mut(100);
        let (b, c) = rest.split_at_mut(57);
        let mut buf_a = vec![0u32; 48 * 48];
        let mut buf_b = vec![0u32; 48 * 48];
        let mut buf_c = vec![0u32; 48 * 48];
        step_physarum_slice(a, 0, 0, &params, &sensed, 48, 48, 11, 3, &mut buf_a);
        step_physarum_slice(c, 157, 0, &params, &sensed, 48, 48, 11, 3, &mut buf_c);
        step_physarum_slice(b, 100, 0, &params, &sensed, 48, 48, 11, 3, &mut buf_b);
        for i in 0..split_counts.len() {
            split_counts[i] = buf_a[i] + buf_b[i] + buf_c[i];
        }

        assert_eq!(whole, split);
        assert_eq!(whole_counts, split_counts);
    }

    #[test]
    fn opposed_species_avoid_each_other() {
        // Two species with -1 coupling to each other on a half-plane
        // initialization: each deposits more where the other's trail is
        // low.
        let w = 50;
        let h = 50;
        let mut field_a = field_with(w, h);
        let mut field_b = field_with(w, h);
        for y in 0..h {
            for x in 0..w {
                if x < w / 2 {
                    field_a.set(x, y, 5.0);
                } else {
                    field_b.set(x, y, 5.0);
                }
            }
        }
        let coupling = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let params = PhysarumSpecies {
            sensor_offset: 5.0,
            ..PhysarumSpecies::default()
        };
        let mut agents_a = spawn_physarum(500, 0, w, h, 21);
        let mut agents_b = spawn_physarum(500, 1, w, h, 21);
        let mut left_a = 0u64;
        let mut right_a = 0u64;
        let mut left_b = 0u64;
        let mut right_b = 0u64;
        let mut scratch = Vec::new();
        for tick in 0..100 {
            let mut counts_a = vec![0u32; w * h];
            let mut counts_b = vec![0u32; w * h];
            {
                let fields = vec![field_a.clone(), field_b.clone()];
                let sensed_a = CombinedField::new(&fields, &coupling[0]);
                let sensed_b = CombinedField::new(&fields, &coupling[1]);
                step_physarum_slice(
                    &mut agents_a, 0, 0, &params, &sensed_a, w, h, 21, tick, &mut counts_a,
                );
                step_physarum_slice(
                    &mut agents_b, 0, 1, &params, &sensed_b, w, h, 21, tick, &mut counts_b,
                );
            }
            for y in 0..h {
                for x in 0..w {
                    let (ca, cb) = (counts_a[y * w + x] as u64, counts_b[y * w + x] as u64);
                    if x < w / 2 {
                        left_a += ca;
                        left_b += cb;
                    } else {
                        right_a += ca;
                        right_b += cb;
                    }
                }
            }
            field_a.apply_deposit_counts(&counts_a, params.deposit);
            field_b.apply_deposit_counts(&counts_b, params.deposit);
            field_a.diffuse_decay(0.9, &mut scratch);
            field_b.diffuse_decay(0.9, &mut scratch);
        }
        // Species A avoids B's half (the right), so it deposits more on
        // the left; symmetric for B.
        assert!(left_a > right_a, "A: left {left_a} right {right_a}");
        assert!(right_b > left_b, "B: left {left_b} right {right_b}");
    }
}
