use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::field::{wrap_coord, TrailField};
use crate::rng::CounterRng;

const STREAM_TERMITE: u64 = 0x7E01;

/// One builder agent, bound 1:1 to a neuron channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermiteAgent {
    pub neuron_id: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Stochastic-walk and deposition constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermiteParams {
    /// Heading noise half-width per step (radians).
    pub sigma: f64,
    /// Probe distance ahead of the agent (cells).
    pub probe_dist: f64,
    /// Angular offset of the side probes (radians).
    pub sense_angle: f64,
    /// Turn applied toward the winning side probe (radians).
    pub turn_angle: f64,
    pub step_size: f64,
    /// Trail level above which the agent deposits.
    pub theta_dep: f64,
    /// Spontaneous deposit probability per step.
    pub p_spont: f64,
    /// Deposit amount per event (trail units).
    pub d_base: f64,
}

impl Default for TermiteParams {
    fn default() -> Self {
        Self {
            sigma: 0.3,
            probe_dist: 3.0,
            sense_angle: core::f64::consts::FRAC_PI_4,
            turn_angle: core::f64::consts::FRAC_PI_4,
            step_size: 1.0,
            theta_dep: 1.0,
            p_spont: 0.005,
            d_base: 10.0,
        }
    }
}

/// Why a deposit happened: exogenous spike override or endogenous rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepositCause {
    Spike,
    Trail,
    Spontaneous,
}

/// Audit record for one deposit event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermiteDeposit {
    pub row: u32,
    pub neuron_id: u32,
    pub cell_x: u32,
    pub cell_y: u32,
    pub amount: f64,
    pub cause: DepositCause,
}

/// Place one agent per channel on a seeded uniform layout.
pub fn spawn_termites(
    n_channels: usize,
    field: &TrailField,
    seed: u64,
) -> Vec<TermiteAgent> {
    (0..n_channels)
        .map(|ch| {
            let mut rng = CounterRng::new(seed, STREAM_TERMITE, ch as u64, u64::MAX);
            TermiteAgent {
                neuron_id: ch as u32,
                x: rng.range_f64(0.0, field.width() as f64),
                y: rng.range_f64(0.0, field.height() as f64),
                heading: rng.range_f64(0.0, core::f64::consts::TAU),
            }
        })
        .collect()
}

/// Advance every termite by one raster row.
///
/// Per agent: jitter the heading, probe the trail ahead (left, center,
/// right), turn toward the strongest probe, advance, then deposit. A
/// spike on the agent's channel this row forces a deposit regardless of
/// the endogenous rule; otherwise the agent deposits when the strongest
/// probe exceeds `theta_dep` or with probability `p_spont`.
///
/// Deposits are written straight into the field (the flock is only 131
/// agents) and every deposit is appended to `audit`.
pub fn step_termites(
    agents: &mut [TermiteAgent],
    field: &mut TrailField,
    spike_words: &[u64],
    params: &TermiteParams,
    seed: u64,
    row: u32,
    audit: &mut Vec<TermiteDeposit>,
) {
    let w = field.width() as f64;
    let h = field.height() as f64;
    for agent in agents.iter_mut() {
        let ch = agent.neuron_id as usize;
        let spiked = (spike_words[ch / 64] >> (ch % 64)) & 1 == 1;
        let mut rng = CounterRng::new(seed, STREAM_TERMITE, ch as u64, row as u64);

        agent.heading += rng.range_f64(-params.sigma, params.sigma);

        let probe = |angle: f64| {
            field.sample(
                agent.x + params.probe_dist * libm::cos(angle),
                agent.y + params.probe_dist * libm::sin(angle),
            )
        };
        let left = probe(agent.heading - params.sense_angle);
        let center = probe(agent.heading);
        let right = probe(agent.heading + params.sense_angle);

        if left > center && left >= right {
            agent.heading -= params.turn_angle;
        } else if right > center && right > left {
            agent.heading += params.turn_angle;
        }

        agent.x = wrap_coord(agent.x + params.step_size * libm::cos(agent.heading), w);
        agent.y = wrap_coord(agent.y + params.step_size * libm::sin(agent.heading), h);

        let sensed_max = left.max(center).max(right);
        // The spontaneous draw is consumed unconditionally so the agent's
        // draw count per row does not depend on the spike pattern.
        let spontaneous = rng.next_bool(params.p_spont);
        let cause = if spiked {
            Some(DepositCause::Spike)
        } else if sensed_max > params.theta_dep {
            Some(DepositCause::Trail)
        } else if spontaneous {
            Some(DepositCause::Spontaneous)
        } else {
            None
        };

        if let Some(cause) = cause {
            let (cx, cy) = field.cell_of(agent.x, agent.y);
            field.add(cx, cy, params.d_base);
            audit.push(TermiteDeposit {
                row,
                neuron_id: agent.neuron_id,
                cell_x: cx as u32,
                cell_y: cy as u32,
                amount: params.d_base,
                cause,
            });
        }
    }
}
