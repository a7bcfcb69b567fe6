//! Directional local refinement around an incumbent action.
//!
//! After a coarse grid pass, probes a random lattice neighbour of the best
//! action. An improving probe sets a direction and the next probe steps
//! further along it; a failed probe falls back to a fresh random neighbour.

use crate::action::{Action, clean};
use crate::rng::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementState {
    pub a_max: Action,
    pub a_next: Action,
    pub direction: [f64; 2],
}

impl RefinementState {
    /// Starts around `a_max` with a random neighbour probe.
    pub fn start(a_max: Action, distance: f64, rng: &mut SeededRng) -> Self {
        Self {
            a_max,
            a_next: random_neighbor(a_max, distance, rng),
            direction: [0.0, 0.0],
        }
    }
}

/// Lattice neighbours of `center` at L-infinity distance `distance` that lie
/// inside the unit square (at most 8).
pub fn neighbors(center: Action, distance: f64) -> Vec<Action> {
    let mut out = Vec::with_capacity(8);
    for dx in [-1.0, 0.0, 1.0] {
        for dy in [-1.0, 0.0, 1.0] {
            if dx == 0.0 && dy == 0.0 {
                continue;
            }
            let x = clean(center.itn() + dx * distance);
            let y = clean(center.irs() + dy * distance);
            if let Ok(a) = Action::new(x, y) {
                out.push(a);
            }
        }
    }
    out
}

pub fn random_neighbor(center: Action, distance: f64, rng: &mut SeededRng) -> Action {
    let ns = neighbors(center, distance);
    if ns.is_empty() {
        return center;
    }
    ns[rng.index(ns.len())]
}

/// One refinement update given the rewards of the probe and the incumbent.
pub fn refine_step(
    state: RefinementState,
    reward_next: f64,
    reward_max: f64,
    distance: f64,
    rng: &mut SeededRng,
) -> RefinementState {
    if reward_next > reward_max {
        let d = [
            state.a_next.itn() - state.a_max.itn(),
            state.a_next.irs() - state.a_max.irs(),
        ];
        let a_next = Action::clamped(
            clean(state.a_next.itn() + d[0]),
            clean(state.a_next.irs() + d[1]),
        );
        RefinementState {
            a_max: state.a_next,
            a_next,
            direction: d,
        }
    } else {
        RefinementState {
            a_max: state.a_max,
            a_next: random_neighbor(state.a_max, distance, rng),
            direction: [0.0, 0.0],
        }
    }
}
