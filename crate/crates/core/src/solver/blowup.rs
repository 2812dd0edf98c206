use super::fd::{self, Parity};
use super::timestep::cfl_dt;
use super::SolverSettings;
use crate::error::Error;
use crate::grid::RadialGrid;
use crate::params::PhysParams;
use crate::state::FluidState;

#[derive(Debug, Clone, PartialEq)]
pub enum BlowupStatus {
    Healthy,
    Suspected(String),
}

impl BlowupStatus {
    pub fn is_healthy(&self) -> bool {
        matches!(self, BlowupStatus::Healthy)
    }
}

/// `max_i max(|u_r|, |u/r|)`, with `u/r` read as `u_r` at the center.
pub fn max_grad_u(state: &FluidState, grid: &RadialGrid) -> f64 {
    let mut u_r = vec![0.0; state.len()];
    fd::ddr(&state.u, grid.dr(), Parity::Odd, &mut u_r);
    let r = grid.nodes();
    let mut worst: f64 = 0.0;
    for i in 0..state.len() {
        let hoop = if i == 0 { u_r[0] } else { state.u[i] / r[i] };
        worst = worst.max(u_r[i].abs()).max(hoop.abs());
    }
    worst
}

/// Flags non-finite fields, a velocity gradient above `s.blowup_gradu_max`,
/// or a collapse of the stable time step below `s.dt_min`.
pub fn detect_blowup(
    state: &FluidState,
    grid: &RadialGrid,
    p: &PhysParams,
    s: &SolverSettings,
) -> BlowupStatus {
    if let Some((node, field)) = state.first_non_finite() {
        return BlowupStatus::Suspected(format!("non-finite {field} at node {node}"));
    }
    let g = max_grad_u(state, grid);
    if g > s.blowup_gradu_max {
        return BlowupStatus::Suspected(format!("max|grad u| = {g:.6e} exceeds threshold"));
    }
    match cfl_dt(state, grid, p, s) {
        Err(Error::DtCollapse(dt)) => BlowupStatus::Suspected(format!("dt collapse ({dt:.3e})")),
        Err(e) => BlowupStatus::Suspected(e.to_string()),
        Ok(_) => BlowupStatus::Healthy,
    }
}
