//! Cross-validation of the successive linearization against the nonlinear
//! solver on a common time grid.

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::grid::RadialGrid;
use crate::scenario::init_scenario;
use crate::solver::{picard_iterate, step, PicardReport};
use crate::state::FluidState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardCheck {
    pub report: PicardReport,
    pub contraction_ratio: f64,
    /// Largest `L²(r dr)` difference of `ρ, u, P, B` between the returned
    /// iterate and the nonlinear solver over the window.
    pub max_difference: [f64; 4],
}

fn l2_difference(grid: &RadialGrid, a: &[f64], b: &[f64]) -> f64 {
    let w = grid.quad_weights();
    let r = grid.nodes();
    (0..grid.len()).map(|i| (a[i] - b[i]).powi(2) * w[i] * r[i]).sum::<f64>().sqrt()
}

fn fields(s: &FluidState) -> [&[f64]; 4] {
    [&s.rho, &s.u, &s.p, &s.b]
}

/// Run the Picard iteration from the initial data of `cfg` over
/// `cfg.picard.window` and step the nonlinear solver with the same `dt`.
pub fn picard_cross_check(cfg: &ScenarioConfig) -> Result<PicardCheck> {
    let sc = init_scenario(cfg)?;
    let (traj, report) = picard_iterate(&sc.state, &cfg.picard, &cfg.physics, &sc.grid, &cfg.solver)?;
    let mut s = sc.state.clone();
    let mut max_difference = [0.0f64; 4];
    for q in traj.iter().skip(1) {
        s = step(&s, report.dt, &cfg.physics, &sc.grid, &cfg.solver)?;
        for (k, (a, b)) in fields(&s).into_iter().zip(fields(q)).enumerate() {
            max_difference[k] = max_difference[k].max(l2_difference(&sc.grid, a, b));
        }
    }
    Ok(PicardCheck { contraction_ratio: report.contraction_ratio(), report, max_difference })
}
