use super::{Scheme, SolverSettings};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::PhysParams;
use crate::state::FluidState;

/// Per-node signal speed used by the CFL condition and the artificial
/// dissipation.
///
/// For the fully explicit scheme this is `|u| + c_s + c_A` with `ρ⁎` in the
/// sound and Alfvén speeds; quasi-stationary vacuum nodes (`vac[i]`) only
/// contribute `|u|`. For the split scheme the fast speed is damped by the
/// implicit viscous solve: with `Q = γP + B²` the stable increment of the
/// explicit/implicit pair is `ν/Q + sqrt((ν/Q)² + ρ⁎Δr²/Q)`, which tends to
/// `Δr/sqrt(Q/ρ⁎)` in dense fluid and to `2ν/Q` as `ρ → 0`.
pub(crate) fn node_speed(
    state: &FluidState,
    p: &PhysParams,
    s: &SolverSettings,
    vac: &[bool],
    h: f64,
    i: usize,
) -> f64 {
    let u = state.u[i].abs();
    let pres = state.p[i].max(0.0);
    let b2 = state.b[i] * state.b[i];
    match s.scheme {
        Scheme::Ssprk3ExplicitViscous => {
            if vac[i] {
                return u;
            }
            let rs = s.rho_star(state.rho[i]);
            u + (p.gamma * pres / rs).sqrt() + (b2 / rs).sqrt()
        }
        Scheme::Rk2ImplicitViscous => {
            let q = p.gamma * pres + b2;
            if q <= 0.0 {
                return u;
            }
            let rs = if vac[i] { 0.0 } else { s.rho_star(state.rho[i]) };
            let tau = p.nu() / q;
            u + h / (tau + (tau * tau + rs * h * h / q).sqrt())
        }
    }
}

pub(crate) fn max_wave_speed(
    state: &FluidState,
    p: &PhysParams,
    s: &SolverSettings,
    vac: &[bool],
    h: f64,
) -> f64 {
    (0..state.len()).map(|i| node_speed(state, p, s, vac, h, i)).fold(0.0, f64::max)
}

/// Stable time step from the signal speed of [`node_speed`] and, for the
/// fully explicit scheme, the viscous restriction `Δr² ρ⁎ / (2ν)`.
///
/// A step below `s.dt_min` is reported as [`Error::DtCollapse`].
pub fn cfl_dt(
    state: &FluidState,
    grid: &RadialGrid,
    p: &PhysParams,
    s: &SolverSettings,
) -> Result<f64> {
    state.ensure_finite()?;
    let h = grid.dr();
    let vac = s.vacuum_nodes(&state.rho);
    let speed = max_wave_speed(state, p, s, &vac, h);
    let mut dt = if speed > 0.0 { h / speed } else { f64::INFINITY };
    if s.scheme == Scheme::Ssprk3ExplicitViscous {
        let nu = if p.geometry.has_swirl() { p.nu().max(p.mu) } else { p.nu() };
        let rho_min = state
            .rho
            .iter()
            .zip(&vac)
            .filter(|(_, &v)| !v)
            .map(|(&r, _)| s.rho_star(r))
            .fold(f64::INFINITY, f64::min);
        if rho_min.is_finite() {
            dt = dt.min(h * h * rho_min / (2.0 * nu));
        }
    }
    let dt = s.cfl * dt;
    if dt < s.dt_min {
        return Err(Error::DtCollapse(dt));
    }
    Ok(dt)
}
