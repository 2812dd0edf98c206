//! Interior vacuum front: particle-path tracking, the conserved magnetic
//! flux `∫₀^R B dr`, and vacuum persistence checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::state::FluidState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumFront {
    /// Current front radius `R(t)`.
    pub r: f64,
    /// Initial radius `r₀`.
    pub r0: f64,
    /// Conserved flux `∫₀^{r₀} B₀ dr`.
    pub c0: f64,
}

impl VacuumFront {
    pub fn new(r0: f64, c0: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Domain(format!("vacuum radius must be positive, got {r0}")));
        }
        if !(c0.abs() > 0.0) || !c0.is_finite() {
            return Err(Error::Domain("vacuum flux must be nonzero".into()));
        }
        Ok(Self { r: r0, r0, c0 })
    }

    fn moved_to(&self, r: f64, r_outer: f64) -> Result<Self> {
        if !(r > 0.0 && r <= r_outer) {
            return Err(Error::Tracking(r));
        }
        Ok(Self { r, ..*self })
    }
}

/// Midpoint step of `R' = u(R, t)` in a velocity field frozen over the step.
pub fn advance_front(
    front: &VacuumFront,
    state: &FluidState,
    grid: &RadialGrid,
    dt: f64,
) -> Result<VacuumFront> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let r = midpoint(front.r, dt, |x| grid.interpolate(&state.u, x));
    front.moved_to(r, grid.r_outer())
}

/// Midpoint step of `R' = u(R, t)` with `u` linear in time between the states
/// at the start (`old` on `grid_old`) and the end (`new` on `grid_new`) of the
/// step.
pub fn advance_front_between(
    front: &VacuumFront,
    old: &FluidState,
    grid_old: &RadialGrid,
    new: &FluidState,
    grid_new: &RadialGrid,
    dt: f64,
) -> Result<VacuumFront> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let half = front.r + 0.5 * dt * grid_old.interpolate(&old.u, front.r);
    let u_half = 0.5 * (grid_old.interpolate(&old.u, half) + grid_new.interpolate(&new.u, half));
    front.moved_to(front.r + dt * u_half, grid_new.r_outer())
}

/// Explicit midpoint step of `x' = u(x)`.
pub(crate) fn midpoint(x: f64, dt: f64, u: impl Fn(f64) -> f64) -> f64 {
    let half = x + 0.5 * dt * u(x);
    x + dt * u(half)
}

/// `∫₀^R B dr` by the trapezoid rule, the partial last cell closed with the
/// interpolated `B(R)`.
pub fn vacuum_flux(state: &FluidState, front: &VacuumFront, grid: &RadialGrid) -> f64 {
    flux_upto(&state.b, front.r, grid)
}

pub fn flux_upto(b: &[f64], r_end: f64, grid: &RadialGrid) -> f64 {
    grid.trapezoid_upto(r_end, |i| b[i], grid.interpolate(b, r_end.min(grid.r_outer())))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumCheck {
    pub max_rho: f64,
    pub max_p: f64,
    /// Node holding the larger of the two maxima, if any node lies inside.
    pub worst_node: Option<usize>,
    pub pass: bool,
}

/// Largest `ρ` and `P` over nodes with `r < R`; passes iff both are `≤ tol`.
pub fn check_vacuum(state: &FluidState, front: &VacuumFront, grid: &RadialGrid, tol: f64) -> VacuumCheck {
    let mut max_rho: f64 = 0.0;
    let mut max_p: f64 = 0.0;
    let mut worst = None;
    let mut worst_val = f64::NEG_INFINITY;
    for (i, &r) in grid.nodes().iter().enumerate() {
        if r >= front.r {
            break;
        }
        max_rho = max_rho.max(state.rho[i]);
        max_p = max_p.max(state.p[i]);
        let local = state.rho[i].max(state.p[i]);
        if local > worst_val {
            worst_val = local;
            worst = Some(i);
        }
    }
    VacuumCheck { max_rho, max_p, worst_node: worst, pass: max_rho <= tol && max_p <= tol }
}

/// Reset `ρ` and `P` to zero on nodes inside the tracked front. Returns the
/// removed `(∫ρ r dr, ∫P r dr)`.
pub fn impose_vacuum(state: &mut FluidState, front: &VacuumFront, grid: &RadialGrid) -> (f64, f64) {
    let w = grid.quad_weights();
    let mut mass = 0.0;
    let mut pres = 0.0;
    for (i, &r) in grid.nodes().iter().enumerate() {
        if r >= front.r {
            break;
        }
        mass += state.rho[i].abs() * w[i] * r;
        pres += state.p[i].abs() * w[i] * r;
        state.rho[i] = 0.0;
        state.p[i] = 0.0;
    }
    (mass, pres)
}
