//! Free outer surface `r = a(t)`: stress condition, surface motion and the
//! growth envelope `a(t) ≤ a₀ + sqrt(t E₀ / (2μ+λ))`.

use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::grid::{integrate, RadialGrid, Weight};
use crate::params::PhysParams;
use crate::solver::fd::{self, Parity};
use crate::state::FluidState;
use crate::vacuum::{flux_upto, midpoint};

/// Uniform grid on `[0, a]`, the affine image of a reference grid on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingGrid {
    reference: RadialGrid,
    a: f64,
    a0: f64,
}

impl MovingGrid {
    pub fn new(cells: usize, a0: f64) -> Result<Self> {
        if !(a0 > 0.0) {
            return Err(Error::GeometryCollapse(a0));
        }
        Ok(Self { reference: RadialGrid::uniform(cells, 1.0)?, a: a0, a0 })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn reference(&self) -> &RadialGrid {
        &self.reference
    }

    /// Physical grid at the current radius.
    pub fn grid(&self) -> RadialGrid {
        RadialGrid::uniform(self.reference.cells(), self.a).expect("radius checked positive")
    }

    pub fn with_radius(&self, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::GeometryCollapse(a));
        }
        Ok(Self { a, ..self.clone() })
    }
}

/// `F = ½B² + P − (2μ+λ)(u_r + u/r)` at the outer node, with a one-sided
/// second-order `u_r`.
pub fn boundary_stress_residual(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> f64 {
    let (f, _) = stress_parts(state, grid, p);
    f
}

fn stress_parts(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> (f64, f64) {
    let n = state.last();
    let h = grid.dr();
    let u = &state.u;
    let div = fd::ddr_at(u, h, Parity::Odd, n) + u[n] / grid.r(n);
    let magnetic = 0.5 * state.b[n] * state.b[n] + state.p[n];
    // magnitude of the terms entering the one-sided stencil
    let stencil = (3.0 * u[n].abs() + 4.0 * u[n - 1].abs() + u[n - 2].abs()) * 0.5 / h + u[n].abs() / grid.r(n);
    (magnetic - p.nu() * div, magnetic.abs() + p.nu() * stencil)
}

/// `|F|` relative to the local stress scale: `½B² + P` plus `(2μ+λ)` times
/// the magnitudes of the terms of the discrete `u_r + u/r`.
pub fn stress_residual_scaled(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> f64 {
    let (f, scale) = stress_parts(state, grid, p);
    if scale > 0.0 {
        f.abs() / scale
    } else {
        f.abs()
    }
}

/// Set the outer velocity so that `F = 0` holds at the surface.
pub fn enforce_stress_bc(state: &mut FluidState, grid: &RadialGrid, p: &PhysParams) {
    let n = state.last();
    state.u[n] = crate::solver::stress_free_velocity(state, grid, p);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemapDefect {
    /// Relative change of `∫ρ r dr` made by the interpolation, before the
    /// conservative correction.
    pub mass: f64,
    /// Relative change of `∫₀^a B dr`.
    pub flux: f64,
}

/// Move the surface by a midpoint step of `a' = u(a)` with the velocity
/// frozen, then remap every field onto the rescaled grid by linear
/// interpolation. Density and pressure are rescaled so that `∫ρ r dr` and
/// `∫P r dr` are unchanged.
pub fn advance_domain(
    mgrid: &MovingGrid,
    state: &FluidState,
    dt: f64,
) -> Result<(MovingGrid, FluidState, RemapDefect)> {
    let old = mgrid.grid();
    if state.len() != old.len() {
        return Err(Error::LengthMismatch { expected: old.len(), got: state.len() });
    }
    let a_new = midpoint(mgrid.a, dt, |r| old.interpolate(&state.u, r));
    if !(a_new > 0.0) || !a_new.is_finite() {
        return Err(Error::GeometryCollapse(a_new));
    }
    let moved = mgrid.with_radius(a_new)?;
    let new = moved.grid();
    let remap = |f: &[f64]| -> Vec<f64> { new.nodes().iter().map(|&r| old.interpolate(f, r)).collect() };
    let mut out = state.clone();
    out.rho = remap(&state.rho);
    out.u = remap(&state.u);
    out.p = remap(&state.p);
    out.b = remap(&state.b);
    out.v = state.v.as_deref().map(remap);
    out.w = state.w.as_deref().map(remap);
    out.t = state.t + dt;

    let mass_old = integrate(&state.rho, &old, Weight::RadialR)?;
    let mass_new = integrate(&out.rho, &new, Weight::RadialR)?;
    let pres_old = integrate(&state.p, &old, Weight::RadialR)?;
    let pres_new = integrate(&out.p, &new, Weight::RadialR)?;
    if mass_new > 0.0 {
        out.rho.iter_mut().for_each(|x| *x *= mass_old / mass_new);
    }
    if pres_new > 0.0 {
        out.p.iter_mut().for_each(|x| *x *= pres_old / pres_new);
    }
    let flux_old = flux_upto(&state.b, old.r_outer(), &old);
    let flux_new = flux_upto(&out.b, new.r_outer(), &new);
    let rel = |a: f64, b: f64| if a != 0.0 { (b - a) / a.abs() } else { b - a };
    Ok((moved, out, RemapDefect { mass: rel(mass_old, mass_new), flux: rel(flux_old, flux_new) }))
}

/// `a₀ + sqrt(E₀ / (2μ+λ))`, the constant entering the free-surface lifespan
/// bound.
pub fn envelope_constant(a0: f64, e0: f64, p: &PhysParams) -> f64 {
    a0 + (e0 / p.nu()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub pass: bool,
    /// Largest `a(t) − a₀ − sqrt(t E₀/(2μ+λ))` over the records.
    pub worst_excess: f64,
    /// Time of the first record violating the envelope.
    pub first_violation: Option<f64>,
    pub c_envelope: f64,
}

/// Check `a(t) ≤ a₀ + sqrt(t E₀/(2μ+λ)) + 1e−8` on every record carrying a
/// surface radius.
pub fn growth_check(history: &[DiagnosticsRecord], a0: f64, e0: f64, p: &PhysParams) -> Result<GrowthReport> {
    if history.is_empty() {
        return Err(Error::InsufficientHistory(0));
    }
    let t0 = history[0].t;
    let mut worst = f64::NEG_INFINITY;
    let mut first = None;
    for rec in history {
        let Some(a) = rec.a_boundary else { continue };
        let excess = a - a0 - ((rec.t - t0).max(0.0) * e0 / p.nu()).sqrt();
        worst = worst.max(excess);
        if excess > 1e-8 && first.is_none() {
            first = Some(rec.t);
        }
    }
    Ok(GrowthReport {
        pass: first.is_none(),
        worst_excess: worst,
        first_violation: first,
        c_envelope: envelope_constant(a0, e0, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Geometry;

    fn params() -> PhysParams {
        PhysParams::new(1.0, 0.0, 1.4, Geometry::Disk2DFree).unwrap()
    }

    #[test]
    fn stress_residual_examples() {
        let g = RadialGrid::uniform(32, 1.0).unwrap();
        let p = params();
        let mut st = FluidState::zeros(g.len(), Geometry::Disk2DFree);
        assert_eq!(boundary_stress_residual(&st, &g, &p), 0.0);
        st.u = g.nodes().iter().map(|r| 0.3 * r).collect();
        assert!((boundary_stress_residual(&st, &g, &p) + 2.0 * 2.0 * 0.3).abs() < 1e-12);
        st.p.fill(0.4);
        st.b = g.nodes().iter().map(|r| r * r).collect();
        enforce_stress_bc(&mut st, &g, &p);
        assert!(stress_residual_scaled(&st, &g, &p) < 1e-14);
    }

    #[test]
    fn domain_motion() {
        let mg = MovingGrid::new(50, 1.0).unwrap();
        let mut st = FluidState::zeros(51, Geometry::Disk2DFree);
        st.rho.fill(2.0);
        let (same, out, _) = advance_domain(&mg, &st, 0.1).unwrap();
        assert_eq!(same.a(), 1.0);
        assert_eq!(out.rho, st.rho);

        st.u.fill(0.25);
        let (moved, out, defect) = advance_domain(&mg, &st, 0.4).unwrap();
        assert!((moved.a() - 1.1).abs() < 1e-14);
        let m0 = integrate(&st.rho, &mg.grid(), Weight::RadialR).unwrap();
        let m1 = integrate(&out.rho, &moved.grid(), Weight::RadialR).unwrap();
        assert!((m1 - m0).abs() < 1e-12 * m0);
        assert!(defect.mass > 0.0);
    }

    #[test]
    fn collapse_is_an_error() {
        let mg = MovingGrid::new(10, 1.0).unwrap();
        let mut st = FluidState::zeros(11, Geometry::Disk2DFree);
        st.u.fill(-5.0);
        assert!(matches!(advance_domain(&mg, &st, 1.0), Err(Error::GeometryCollapse(_))));
    }

    #[test]
    fn growth_envelope() {
        let p = PhysParams::new(1.0, 0.0, 1.4, Geometry::Disk2DFree).unwrap();
        let rec = |t: f64, a: f64| DiagnosticsRecord { t, a_boundary: Some(a), ..Default::default() };
        let calm: Vec<_> = (0..10).map(|k| rec(k as f64 * 0.1, 1.0)).collect();
        let rep = growth_check(&calm, 1.0, 2.0, &p).unwrap();
        assert!(rep.pass);
        assert!((rep.c_envelope - 2.0).abs() < 1e-15);
        let fast: Vec<_> = (0..10).map(|k| rec(k as f64 * 0.1, 1.0 + 2.0 * (k as f64 * 0.1).sqrt())).collect();
        let rep = growth_check(&fast, 1.0, 2.0, &p).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_violation, Some(0.1));
        assert!(growth_check(&[], 1.0, 2.0, &p).is_err());
    }
}
