use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::field::wrap_coord;
use crate::rng::CounterRng;

const STREAM_BOID: u64 = 0x7E03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boid {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

/// Flocking weights and limits on a toroidal world of `world_w` by
/// `world_h` units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoidsParams {
    pub r_neighbor: f64,
    pub r_sep: f64,
    pub w_coh: f64,
    pub w_sep: f64,
    pub w_ali: f64,
    pub max_speed: f64,
    pub max_force: f64,
    pub world_w: f64,
    pub world_h: f64,
}

impl Default for BoidsParams {
    fn default() -> Self {
        Self {
            r_neighbor: 40.0,
            r_sep: 12.0,
            w_coh: 0.02,
            w_sep: 0.3,
            w_ali: 0.05,
            max_speed: 3.0,
            max_force: 0.25,
            world_w: 512.0,
            world_h: 512.0,
        }
    }
}

/// Seeded spawn: uniform positions, uniform headings at half max speed.
pub fn spawn_boids(count: usize, params: &BoidsParams, seed: u64) -> Vec<Boid> {
    (0..count)
        .map(|i| {
            let mut rng = CounterRng::new(seed, STREAM_BOID, i as u64, u64::MAX);
            let heading = rng.range_f64(0.0, core::f64::consts::TAU);
            let speed = 0.5 * params.max_speed;
            Boid {
                x: rng.range_f64(0.0, params.world_w),
                y: rng.range_f64(0.0, params.world_h),
                vx: speed * libm::cos(heading),
                vy: speed * libm::sin(heading),
            }
        })
        .collect()
}

/// Shortest toroidal displacement from `a` to `b` along one axis.
#[inline]
fn wrap_delta(a: f64, b: f64, extent: f64) -> f64 {
    let mut d = b - a;
    if d > extent * 0.5 {
        d -= extent;
    } else if d < -extent * 0.5 {
        d += extent;
    }
    d
}

/// Steering force on boid `i` from cohesion, separation and alignment
/// over its neighbors, clamped to `max_force`. `candidates` enumerates
/// the indices to test (the naive path passes everything; the grid path
/// passes the 3x3 cell neighborhood).
fn force_from_candidates<I: Iterator<Item = usize>>(
    i: usize,
    boids: &[Boid],
    params: &BoidsParams,
    candidates: I,
) -> (f64, f64) {
    let me = boids[i];
    let r2 = params.r_neighbor * params.r_neighbor;
    let sep2 = params.r_sep * params.r_sep;
    let mut n = 0usize;
    let (mut cx, mut cy) = (0.0, 0.0);
    let (mut ax, mut ay) = (0.0, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for j in candidates {
        if j == i {
            continue;
        }
        let other = boids[j];
        let dx = wrap_delta(me.x, other.x, params.world_w);
        let dy = wrap_delta(me.y, other.y, params.world_h);
        let d2 = dx * dx + dy * dy;
        if d2 > r2 {
            continue;
        }
        n += 1;
        cx += dx;
        cy += dy;
        ax += other.vx;
        ay += other.vy;
        if d2 < sep2 {
            let inv = 1.0 / d2.max(1e-9);
            sx -= dx * inv;
            sy -= dy * inv;
        }
    }
    if n == 0 {
        return (0.0, 0.0);
    }
    let inv_n = 1.0 / n as f64;
    // Cohesion: toward the neighbor centroid (in relative coordinates).
    let mut fx = params.w_coh * cx * inv_n;
    let mut fy = params.w_coh * cy * inv_n;
    // Alignment: toward the mean neighbor velocity.
    fx += params.w_ali * (ax * inv_n - me.vx);
    fy += params.w_ali * (ay * inv_n - me.vy);
    // Separation: away from close neighbors, inverse-square weighted.
    fx += params.w_sep * sx;
    fy += params.w_sep * sy;

    let mag2 = fx * fx + fy * fy;
    let max2 = params.max_force * params.max_force;
    if mag2 > max2 && mag2 > 0.0 {
        let scale = params.max_force / libm::sqrt(mag2);
        fx *= scale;
        fy *= scale;
    }
    (fx, fy)
}

/// Naive O(n^2) force on boid `i`.
pub fn force_naive(i: usize, boids: &[Boid], params: &BoidsParams) -> (f64, f64) {
    force_from_candidates(i, boids, params, 0..boids.len())
}

/// Uniform toroidal grid over boid indices for neighbor candidate lookup.
/// Cell size is at least `r_neighbor`, so the 3x3 neighborhood of a cell
/// covers every possible neighbor.
pub struct BoidGrid {
    cols: usize,
    rows: usize,
    cell_w: f64,
    cell_h: f64,
    cells: Vec<Vec<u32>>,
}

impl BoidGrid {
    pub fn build(boids: &[Boid], params: &BoidsParams) -> Self {
        let cols = ((params.world_w / params.r_neighbor) as usize).max(1);
        let rows = ((params.world_h / params.r_neighbor) as usize).max(1);
        let cell_w = params.world_w / cols as f64;
        let cell_h = params.world_h / rows as f64;
        let mut cells = vec![Vec::new(); cols * rows];
        for (i, b) in boids.iter().enumerate() {
            let cx = ((wrap_coord(b.x, params.world_w) / cell_w) as usize).min(cols - 1);
            let cy = ((wrap_coord(b.y, params.world_h) / cell_h) as usize).min(rows - 1);
            cells[cy * cols + cx].push(i as u32);
        }
        Self { cols, rows, cell_w, cell_h, cells }
    }

    fn candidates(&self, b: &Boid, world_w: f64, world_h: f64) -> impl Iterator<Item = usize> + '_ {
        let cx = ((wrap_coord(b.x, world_w) / self.cell_w) as usize).min(self.cols - 1);
        let cy = ((wrap_coord(b.y, world_h) / self.cell_h) as usize).min(self.rows - 1);
        let cols = self.cols;
        // On axes narrower than 3 cells the wrapped 3x3 window would
        // revisit cells; enumerate each distinct cell once.
        let xs = distinct_offsets(cx, self.cols);
        let ys = distinct_offsets(cy, self.rows);
        ys.into_iter().flatten().flat_map(move |gy| {
            xs.into_iter()
                .flatten()
                .flat_map(move |gx| self.cells[gy * cols + gx].iter().map(|&i| i as usize))
        })
    }
}

/// Up to three distinct wrapped cell indices around `c` on an axis of
/// `extent` cells.
#[inline]
fn distinct_offsets(c: usize, extent: usize) -> [Option<usize>; 3] {
    match extent {
        1 => [Some(0), None, None],
        2 => [Some(0), Some(1), None],
        _ => [
            Some((c + extent - 1) % extent),
            Some(c),
            Some((c + 1) % extent),
        ],
    }
}

/// Grid-accelerated force; must agree with [`force_naive`] up to floating
/// summation order.
pub fn force_grid(i: usize, boids: &[Boid], params: &BoidsParams, grid: &BoidGrid) -> (f64, f64) {
    force_from_candidates(
        i,
        boids,
        params,
        grid.candidates(&boids[i], params.world_w, params.world_h),
    )
}

/// Heading kicks applied to spike-mapped cohorts: boid `i` belongs to the
/// cohort of channel `i % n_channels`, and each spike on that channel
/// this tick rotates the boid's velocity by `spike_gain` radians.
pub fn apply_spike_kicks(
    boids: &mut [Boid],
    spike_counts: &[u32],
    n_channels: usize,
    spike_gain: f64,
) {
    if n_channels == 0 || spike_gain == 0.0 {
        return;
    }
    for (i, boid) in boids.iter_mut().enumerate() {
        let kicks = spike_counts[i % n_channels];
        if kicks == 0 {
            continue;
        }
        let angle = spike_gain * kicks as f64;
        let (sin, cos) = (libm::sin(angle), libm::cos(angle));
        let (vx, vy) = (boid.vx, boid.vy);
        boid.vx = vx * cos - vy * sin;
        boid.vy = vx * sin + vy * cos;
    }
}

/// Integrate one tick from precomputed forces: velocity plus force,
/// speed-clamped, position advanced on the torus.
pub fn integrate(boids: &mut [Boid], forces: &[(f64, f64)], params: &BoidsParams) {
    debug_assert_eq!(boids.len(), forces.len());
    let max2 = params.max_speed * params.max_speed;
    for (b, &(fx, fy)) in boids.iter_mut().zip(forces) {
        b.vx += fx;
        b.vy += fy;
        let v2 = b.vx * b.vx + b.vy * b.vy;
        if v2 > max2 && v2 > 0.0 {
            let scale = params.max_speed / libm::sqrt(v2);
            b.vx *= scale;
            b.vy *= scale;
        }
        b.x = wrap_coord(b.x + b.vx, params.world_w);
        b.y = wrap_coord(b.y + b.vy, params.world_h);
    }
}

/// Sequential full step (kicks, naive forces, integration). The engine
/// parallelizes the force pass itself; this is the reference path.
pub fn step_boids_naive(
    boids: &mut [Boid],
    params: &BoidsParams,
    spike_counts: &[u32],
    n_channels: usize,
    spike_gain: f64,
) {
    apply_spike_kicks(boids, spike_counts, n_channels, spike_gain);
    let forces: Vec<(f64, f64)> = (0..boids.len())
        .map(|i| force_naive(i, boids, params))
        .collect();
    integrate(boids, &forces, params);
}
