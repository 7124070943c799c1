//! Homogeneous single-site mean-field engines.
//!
//! Every qubit carries the same Bloch vector. One step applies the field kick
//! `exp(−ihX)`, then the mean-field Ising rotation `exp(iJξ z_prev Z)`, and in
//! dissipative mode a dephasing channel whose probability comes from the
//! neighbour-fluctuation variance `ξ(1 − z_prev²)`. `z_prev` is ⟨Z⟩ at the
//! start of the step and feeds both the coherent rotation and the variance.

use crate::qubit_state::{dephasing_probability, BlochState, DriveParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Unitary,
    Dissipative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldTrace {
    /// `states[k]` is the state after `k` steps; `states[0]` is `|0⟩`.
    pub states: Vec<BlochState>,
    /// Dephasing probability used in step `k + 1` (all zero in unitary mode).
    pub dephasing: Vec<f64>,
    pub params: DriveParams,
    pub xi: f64,
    pub mode: Mode,
}

impl MeanFieldTrace {
    pub fn final_state(&self) -> BlochState {
        *self
            .states
            .last()
            .expect("trace always holds the initial state")
    }

    pub fn magnetization(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.z)
    }
}

/// Neighbour-fluctuation variance `ξ(1 − z²)`.
pub fn fluctuation_variance(xi: f64, z: f64) -> f64 {
    (xi * (1.0 - z * z)).max(0.0)
}

pub fn step_unitary(s: BlochState, params: &DriveParams, xi: f64, z_prev: f64) -> BlochState {
    s.rotate_x(params.h).rotate_z(params.j * xi * z_prev)
}

/// One dissipative step. Returns the new state and the dephasing probability used.
pub fn step_dissipative(
    s: BlochState,
    params: &DriveParams,
    xi: f64,
    z_prev: f64,
) -> (BlochState, f64) {
    let p = dephasing_probability(fluctuation_variance(xi, z_prev), params.j)
        .expect("clamped variance is non-negative");
    let out = step_unitary(s, params, xi, z_prev).shrink_coherence(1.0 - 2.0 * p);
    (out, p)
}

pub fn run(params: &DriveParams, xi: f64, mode: Mode) -> MeanFieldTrace {
    let mut states = Vec::with_capacity(params.steps + 1);
    let mut dephasing = Vec::with_capacity(params.steps);
    let mut s = BlochState::ZERO_KET;
    states.push(s);
    for _ in 0..params.steps {
        let z_prev = s.z;
        s = match mode {
            Mode::Unitary => {
                dephasing.push(0.0);
                step_unitary(s, params, xi, z_prev)
            }
            Mode::Dissipative => {
                let (next, p) = step_dissipative(s, params, xi, z_prev);
                dephasing.push(p);
                next
            }
        };
        states.push(s);
    }
    MeanFieldTrace {
        states,
        dephasing,
        params: *params,
        xi,
        mode,
    }
}
