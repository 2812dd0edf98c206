//! The fractional-moment chain: multiplier integrals of the vacuum balance,
//! the Cauchy–Schwarz flux estimate and the divergence bound.

use serde::Serialize;

use super::bounds::moment_coefficient;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::PhysParams;
use crate::solver::fd;
use crate::state::FluidState;
use crate::vacuum::flux_upto;

fn divergence(state: &FluidState, grid: &RadialGrid) -> Vec<f64> {
    let mut d = vec![0.0; state.len()];
    fd::divergence(&state.u, grid.nodes(), grid.dr(), &mut d);
    d
}

/// `∫₀^R r^β q dr` with the power weight integrated exactly against the
/// piecewise-linear interpolant of `q`.
fn weighted(grid: &RadialGrid, r_end: f64, q: &[f64], beta: f64) -> f64 {
    grid.power_weighted_upto(r_end, q, beta)
}

fn check_alpha(alpha: f64) -> Result<()> {
    moment_coefficient(alpha).map(|_| ())
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("front radius must be positive, got {r}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPair {
    pub lhs: f64,
    pub rhs: f64,
    pub rhs_floor: f64,
}

/// Both sides of the multiplier identity on `[0, R]`:
///
/// * `lhs = −(2μ+λ) ∫ (αR r^{α−1} − (α+1) r^α)(u_r + u/r) dr`,
/// * `rhs = ∫ [(1 − α/2) B² R r^{α−1} + ((α−1)/2) B² r^α] dr`,
/// * `rhs_floor = ((2−α)/2) R ∫ B² r^{α−1} dr`.
pub fn moment_pair(state: &FluidState, r_front: f64, grid: &RadialGrid, p: &PhysParams, alpha: f64) -> Result<MomentPair> {
    check_alpha(alpha)?;
    check_radius(r_front)?;
    let big_r = r_front;
    let d = divergence(state, grid);
    let lhs = -p.nu()
        * (alpha * big_r * weighted(grid, big_r, &d, alpha - 1.0) - (alpha + 1.0) * weighted(grid, big_r, &d, alpha));
    let b2: Vec<f64> = state.b.iter().map(|b| b * b).collect();
    let b2_low = weighted(grid, big_r, &b2, alpha - 1.0);
    let rhs = (1.0 - 0.5 * alpha) * big_r * b2_low + 0.5 * (alpha - 1.0) * weighted(grid, big_r, &b2, alpha);
    let rhs_floor = 0.5 * (2.0 - alpha) * big_r * b2_low;
    Ok(MomentPair { lhs, rhs, rhs_floor })
}

/// The multiplier integral before integration by parts,
/// `(2μ+λ) ∫₀^R (R r^α − r^{α+1}) ∂_r(u_r + u/r) dr`; equal to
/// [`MomentPair::lhs`] up to discretization error.
pub fn moment_lhs_unintegrated(state: &FluidState, r_front: f64, grid: &RadialGrid, p: &PhysParams, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_radius(r_front)?;
    let mut dd = vec![0.0; state.len()];
    fd::vector_laplacian(&state.u, grid.nodes(), grid.dr(), &mut dd);
    Ok(p.nu() * (r_front * weighted(grid, r_front, &dd, alpha) - weighted(grid, r_front, &dd, alpha + 1.0)))
}

/// `(∫₀^R B² r^{α−1} dr) R^{2−α}/(2−α) − (∫₀^R B dr)²`, nonnegative by
/// Cauchy–Schwarz.
pub fn cauchy_schwarz_gap(state: &FluidState, r_front: f64, grid: &RadialGrid, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_radius(r_front)?;
    let b2: Vec<f64> = state.b.iter().map(|b| b * b).collect();
    let moment = weighted(grid, r_front, &b2, alpha - 1.0);
    let flux = flux_upto(&state.b, r_front, grid);
    Ok(moment * r_front.powf(2.0 - alpha) / (2.0 - alpha) - flux * flux)
}

/// `‖u_r + u/r‖` in `L²(r dr)` over the whole grid.
pub fn div_norm(state: &FluidState, grid: &RadialGrid) -> f64 {
    div_norm_upto(state, grid.r_outer(), grid)
}

/// `‖u_r + u/r‖` in `L²(r dr)` over `[0, R]`.
pub fn div_norm_upto(state: &FluidState, r_end: f64, grid: &RadialGrid) -> f64 {
    let d2: Vec<f64> = divergence(state, grid).iter().map(|d| d * d).collect();
    weighted(grid, r_end, &d2, 1.0).max(0.0).sqrt()
}

/// Slack of `|lhs| ≤ (2μ+λ) g(α) R^α ‖u_r + u/r‖_{L²(0,R)}`.
pub fn lhs_chain_slack(state: &FluidState, r_front: f64, grid: &RadialGrid, p: &PhysParams, alpha: f64) -> Result<f64> {
    let pair = moment_pair(state, r_front, grid, p, alpha)?;
    let g = moment_coefficient(alpha)?;
    Ok(p.nu() * g * r_front.powf(alpha) * div_norm_upto(state, r_front, grid) - pair.lhs.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Geometry;

    fn setup(n: usize) -> (RadialGrid, PhysParams, FluidState) {
        let g = RadialGrid::uniform(n, 1.0).unwrap();
        let p = PhysParams::new(0.5, 0.0, 1.4, Geometry::Disk2D).unwrap();
        let st = FluidState::zeros(g.len(), Geometry::Disk2D);
        (g, p, st)
    }

    #[test]
    fn no_field_no_rhs() {
        let (g, p, mut st) = setup(64);
        st.u = g.nodes().iter().map(|r| r * (1.0 - r)).collect();
        let m = moment_pair(&st, 0.7, &g, &p, 1.5).unwrap();
        assert_eq!(m.rhs, 0.0);
        assert_eq!(m.rhs_floor, 0.0);
    }

    #[test]
    fn integration_by_parts_forms() {
        let (g, p, mut st) = setup(256);
        st.u = g.nodes().iter().map(|r| r * (1.0 - r)).collect();
        let pre = moment_lhs_unintegrated(&st, 1.0, &g, &p, 1.5).unwrap();
        let post = moment_pair(&st, 1.0, &g, &p, 1.5).unwrap().lhs;
        assert!((pre + 0.342857142857).abs() < 1e-3, "{pre}");
        assert!((post + 0.342857142857).abs() < 1e-3, "{post}");
    }

    #[test]
    fn rhs_closed_form() {
        let (g, p, mut st) = setup(2048);
        st.b = g.nodes().to_vec();
        let m = moment_pair(&st, 1.0, &g, &p, 1.5).unwrap();
        assert!((m.rhs - 0.126984126984).abs() < 1e-6, "{}", m.rhs);
        assert!(m.rhs >= m.rhs_floor);
    }

    #[test]
    fn cauchy_schwarz_constant_field() {
        let (g, _, mut st) = setup(4096);
        st.b.fill(1.0);
        let gap = cauchy_schwarz_gap(&st, 1.0, &g, 1.5).unwrap();
        assert!((gap - 1.0 / 3.0).abs() < 1e-4, "{gap}");
        st.b.fill(0.0);
        assert_eq!(cauchy_schwarz_gap(&st, 1.0, &g, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn divergence_norm_examples() {
        let (g, _, mut st) = setup(512);
        assert_eq!(div_norm(&st, &g), 0.0);
        st.u = g.nodes().to_vec();
        assert!((div_norm(&st, &g) - 2f64.sqrt()).abs() < 1e-12);
        st.u = g.nodes().iter().map(|r| r * (1.0 - r)).collect();
        assert!((div_norm(&st, &g) - 0.5).abs() < 1e-4);
    }
}
