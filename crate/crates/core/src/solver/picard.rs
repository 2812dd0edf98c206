use serde::{Deserialize, Serialize};

use super::step::{step_with, tendency_evaluations, StepExtras};
use super::timestep::cfl_dt;
use super::SolverSettings;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::{Geometry, PhysParams};
use crate::state::FluidState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardSettings {
    pub window: f64,
    pub tol: f64,
    pub k_max: usize,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self { window: 0.01, tol: 1e-8, k_max: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    /// `sup_t (‖ρ̃‖² + ‖P̃‖² + ‖B̃‖² + ‖√ρ ũ‖²)` of successive differences,
    /// one entry per iteration.
    pub phi: Vec<f64>,
    /// Index into `phi` of the returned iterate.
    pub best: usize,
    pub dt: f64,
    pub steps: usize,
}

impl PicardReport {
    /// Ratios `φ⁽ⁱ⁺¹⁾ / φ⁽ⁱ⁾` of successive difference energies.
    pub fn ratios(&self) -> Vec<f64> {
        self.phi.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
    }

    /// Largest observed ratio; zero when fewer than two iterations ran.
    pub fn contraction_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }
}

fn weighted_sq(grid: &RadialGrid, f: impl Fn(usize) -> f64) -> f64 {
    let w = grid.quad_weights();
    let r = grid.nodes();
    (0..grid.len()).map(|i| f(i) * w[i] * r[i]).sum()
}

/// Difference energy between two trajectories on the same time levels.
fn difference_energy(a: &[FluidState], b: &[FluidState], grid: &RadialGrid) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            weighted_sq(grid, |i| {
                let dr = x.rho[i] - y.rho[i];
                let dp = x.p[i] - y.p[i];
                let db = x.b[i] - y.b[i];
                let du = x.u[i] - y.u[i];
                dr * dr + dp * dp + db * db + x.rho[i].max(0.0) * du * du
            })
        })
        .fold(0.0, f64::max)
}

/// Successive linearization over `[t0, t0 + window]` for the fixed-wall
/// disk. Iterate `i` solves the system with `ρ, P, B` transported and `u`
/// advected by the velocity of iterate `i − 1`, sampled at the same stages
/// of the same steps; iterate 0 is the frozen initial velocity. A fixed
/// point is therefore the nonlinear discrete trajectory. Stops when the difference energy drops below `tol`,
/// after `k_max` iterations, or when it grows three times in a row (reported
/// as divergence; the best iterate is returned).
pub fn picard_iterate(
    state0: &FluidState,
    ps: &PicardSettings,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<(Vec<FluidState>, PicardReport)> {
    if p.geometry != Geometry::Disk2D {
        return Err(Error::Config("Picard iteration is implemented for the fixed-wall disk".into()));
    }
    if !(ps.window > 0.0) || !(ps.tol > 0.0) || ps.k_max == 0 {
        return Err(Error::Config("Picard window, tolerance and k_max must be positive".into()));
    }
    let dt_cfl = cfl_dt(state0, grid, p, s)?;
    let steps = ((ps.window / dt_cfl).ceil() as usize).max(1);
    let dt = ps.window / steps as f64;

    let mut previous: Vec<FluidState> = vec![state0.clone(); steps + 1];
    for (k, st) in previous.iter_mut().enumerate() {
        st.t = state0.t + k as f64 * dt;
    }
    let frozen = vec![state0.u.clone(); tendency_evaluations(s.scheme)];
    let mut transport: Vec<Vec<Vec<f64>>> = vec![frozen; steps];
    let mut phi = Vec::new();
    let mut best: Option<(f64, Vec<FluidState>, usize)> = None;
    let mut growth = 0;
    let (mut converged, mut diverged) = (false, false);

    for iter in 0..ps.k_max {
        let mut traj = Vec::with_capacity(steps + 1);
        traj.push(state0.clone());
        let mut stages = Vec::with_capacity(steps);
        for k in 0..steps {
            let extras = StepExtras { forcing: None, transport: Some(&transport[k]) };
            let out = step_with(&traj[k], dt, p, grid, s, &extras)?;
            stages.push(out.stage_velocities);
            let mut next = out.state;
            next.t = state0.t + (k + 1) as f64 * dt;
            traj.push(next);
        }
        let e = difference_energy(&traj, &previous, grid);
        if let Some(&last) = phi.last() {
            growth = if e > last { growth + 1 } else { 0 };
        }
        phi.push(e);
        if best.as_ref().is_none_or(|b| e <= b.0) {
            best = Some((e, traj.clone(), iter));
        }
        previous = traj;
        transport = stages;
        if e < ps.tol {
            converged = true;
            break;
        }
        if growth >= 3 {
            diverged = true;
            break;
        }
    }
    let (_, traj, best_idx) = best.expect("at least one iteration");
    let report = PicardReport { iterations: phi.len(), converged, diverged, phi, best: best_idx, dt, steps };
    Ok((traj, report))
}
