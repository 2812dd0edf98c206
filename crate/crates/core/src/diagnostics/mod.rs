//! Energy and dissipation ledgers, the fractional-moment chain and the
//! closed-form lifespan bounds, evaluated on nodal data.

mod bounds;
mod moments;

use serde::Serialize;

pub use bounds::{
    alpha_min, div_lower_bound, lifespan_bound, moment_coefficient, optimize_alpha, BoundInputs, ALPHA_STEP,
};
pub use moments::{
    cauchy_schwarz_gap, div_norm, div_norm_upto, lhs_chain_slack, moment_lhs_unintegrated, moment_pair, MomentPair,
};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::{Geometry, PhysParams};
use crate::solver::fd::{self, Parity};
use crate::state::FluidState;

/// One row of the run history.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub dissipation_rate: f64,
    pub dissipation_cum: f64,
    pub div_l2: f64,
    pub div_lower_bound: Option<f64>,
    pub moment_lhs: Option<f64>,
    pub moment_rhs: Option<f64>,
    pub flux_vacuum: Option<f64>,
    pub r_front: Option<f64>,
    pub a_boundary: Option<f64>,
    pub max_gradu: f64,
    pub dt: f64,
    /// Largest `ρ` and `P` inside the front before the vacuum is re-imposed.
    pub vacuum_max_rho: Option<f64>,
    pub vacuum_max_p: Option<f64>,
    /// Largest relative stress residual at the free surface during the step.
    pub stress_residual: Option<f64>,
    /// Pointwise check `2(u_r² + u²/r²) − (u_r + u/r)²`, minimum over nodes.
    pub pointwise_slack: Option<f64>,
}

/// `∫ (½ρ|u|² + P/(γ−1) + ½B²) r dr`, with `|u|² = u² + v² + w²` when swirl
/// is present.
pub fn total_energy(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> f64 {
    let w = grid.quad_weights();
    let r = grid.nodes();
    let mut sum = 0.0;
    for i in 0..state.len() {
        let mut speed2 = state.u[i] * state.u[i];
        if let Some(v) = &state.v {
            speed2 += v[i] * v[i];
        }
        if let Some(wz) = &state.w {
            speed2 += wz[i] * wz[i];
        }
        let density = 0.5 * state.rho[i] * speed2 + state.p[i] / (p.gamma - 1.0) + 0.5 * state.b[i] * state.b[i];
        sum += density * w[i] * r[i];
    }
    sum
}

/// Viscous dissipation rate. Disk: `(2μ+λ)∫(u_r + u/r)² r dr`. Cylinder:
/// `∫[(2μ+λ)(r u_r² + u²/r) + μ(r v_r² + v²/r) + μ r w_r²] dr`.
pub fn dissipation_rate(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> f64 {
    let m = state.len();
    let h = grid.dr();
    let r = grid.nodes();
    let w = grid.quad_weights();
    match p.geometry {
        Geometry::Disk2D | Geometry::Disk2DFree => {
            let mut d = vec![0.0; m];
            fd::divergence(&state.u, r, h, &mut d);
            p.nu() * (0..m).map(|i| d[i] * d[i] * r[i] * w[i]).sum::<f64>()
        }
        Geometry::Cylinder3D => {
            let odd_part = |q: &[f64], coef: f64| -> f64 {
                let mut q_r = vec![0.0; m];
                fd::ddr(q, h, Parity::Odd, &mut q_r);
                (1..m).map(|i| coef * (r[i] * q_r[i] * q_r[i] + q[i] * q[i] / r[i]) * w[i]).sum()
            };
            let mut total = odd_part(&state.u, p.nu());
            if let Some(v) = &state.v {
                total += odd_part(v, p.mu);
            }
            if let Some(wz) = &state.w {
                let mut w_r = vec![0.0; m];
                fd::ddr(wz, h, Parity::Even, &mut w_r);
                total += (0..m).map(|i| p.mu * r[i] * w_r[i] * w_r[i] * w[i]).sum::<f64>();
            }
            total
        }
    }
}

/// Minimum over nodes of `2(u_r² + u²/r²) − (u_r + u/r)²` (the center uses
/// `u/r → u_r`).
pub fn pointwise_divergence_slack(state: &FluidState, grid: &RadialGrid) -> f64 {
    let m = state.len();
    let mut u_r = vec![0.0; m];
    fd::ddr(&state.u, grid.dr(), Parity::Odd, &mut u_r);
    let r = grid.nodes();
    (0..m)
        .map(|i| {
            let hoop = if i == 0 { u_r[0] } else { state.u[i] / r[i] };
            2.0 * (u_r[i] * u_r[i] + hoop * hoop) - (u_r[i] + hoop).powi(2)
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyResidual {
    /// `max_t |E(t) + ∫₀ᵗ D − E₀| / E₀`.
    pub two_sided: f64,
    /// `max_t max(E(t) + ∫₀ᵗ D − E₀, 0) / E₀`: energy creation only.
    pub creation: f64,
    /// Signed value at the last record.
    pub last: f64,
}

/// Energy ledger over a history, with the dissipation integrated in time by
/// the trapezoid rule over the records.
pub fn energy_residual(history: &[DiagnosticsRecord]) -> Result<EnergyResidual> {
    if history.len() < 2 {
        return Err(Error::InsufficientHistory(history.len()));
    }
    let e0 = history[0].energy;
    let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
    let mut cum = 0.0;
    let mut two_sided: f64 = 0.0;
    let mut creation: f64 = 0.0;
    let mut last = 0.0;
    for k in 1..history.len() {
        let (a, b) = (&history[k - 1], &history[k]);
        cum += 0.5 * (b.t - a.t) * (a.dissipation_rate + b.dissipation_rate);
        last = (b.energy + cum - e0) / scale;
        two_sided = two_sided.max(last.abs());
        creation = creation.max(last);
    }
    Ok(EnergyResidual { two_sided, creation, last })
}
