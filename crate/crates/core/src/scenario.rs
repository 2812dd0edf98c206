//! Initial data and the quantities fixed at `t = 0`: the vacuum front, the
//! conserved flux, the initial energy and the lifespan bound.

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::diagnostics::{lifespan_bound, optimize_alpha, total_energy, BoundInputs};
use crate::error::{Error, Result};
use crate::free_boundary::{enforce_stress_bc, envelope_constant};
use crate::grid::RadialGrid;
use crate::mms::Manufactured;
use crate::params::Geometry;
use crate::solver::solve_vacuum_balance;
use crate::state::FluidState;
use crate::vacuum::{flux_upto, VacuumFront};

/// Smallest `|C₀|` accepted as a nondegenerate vacuum flux.
pub const MIN_FLUX: f64 = 1e-12;

/// Lifespan-bound summary of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSummary {
    pub c0: f64,
    pub e0: f64,
    /// `R₀` for walls, `a₀ + sqrt(E₀/(2μ+λ))` for the free surface.
    pub r_ref: f64,
    pub alpha_star: f64,
    pub t_bound: f64,
    pub c_envelope: Option<f64>,
}

impl BoundSummary {
    pub fn inputs(&self, cfg: &ScenarioConfig) -> BoundInputs {
        BoundInputs {
            mu: cfg.physics.mu,
            lam: cfg.physics.lam,
            r_ref: self.r_ref,
            c0: self.c0,
            e0: self.e0,
            alpha: self.alpha_star,
            geometry: cfg.physics.geometry,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: RadialGrid,
    pub state: FluidState,
    pub front: Option<VacuumFront>,
    pub bounds: BoundSummary,
    /// `max ρ₀`, the scale of the vacuum tolerance.
    pub rho_max: f64,
}

/// Evaluate the bound quantities from `C₀`, `E₀` and the overrides.
pub fn bound_summary(cfg: &ScenarioConfig, c0: f64, e0: f64) -> Result<BoundSummary> {
    let c0 = cfg.bounds.c0.unwrap_or(c0);
    let e0 = cfg.bounds.e0.unwrap_or(e0);
    let free = cfg.physics.geometry == Geometry::Disk2DFree;
    let c_envelope = free.then(|| envelope_constant(cfg.r_outer, e0, &cfg.physics));
    let r_ref = cfg.bounds.r_ref.or(c_envelope).unwrap_or(cfg.r_outer);
    let template = BoundInputs {
        mu: cfg.physics.mu,
        lam: cfg.physics.lam,
        r_ref,
        c0,
        e0,
        alpha: 1.5f64.max(crate::diagnostics::alpha_min(cfg.physics.geometry)),
        geometry: cfg.physics.geometry,
    };
    let (alpha_star, t_bound) = match cfg.bounds.alpha {
        Some(alpha) => {
            let b = template.with_alpha(alpha);
            (alpha, lifespan_bound(&b)?)
        }
        None => optimize_alpha(&template)?,
    };
    Ok(BoundSummary { c0, e0, r_ref, alpha_star, t_bound, c_envelope })
}

fn sample_profiles(cfg: &ScenarioConfig, grid: &RadialGrid) -> FluidState {
    let geometry = cfg.physics.geometry;
    let mut st = FluidState::zeros(grid.len(), geometry);
    if cfg.manufactured {
        let m = Manufactured::new(cfg.r_outer, &cfg.physics);
        return m.state(grid, 0.0, &st);
    }
    let r = grid.nodes();
    st.rho = cfg.init.rho.sample(r);
    st.u = cfg.init.u.sample(r);
    st.p = cfg.init.p.sample(r);
    st.b = cfg.init.b.sample(r);
    if geometry.has_swirl() {
        st.v = Some(cfg.init.v.as_ref().map_or_else(|| vec![0.0; r.len()], |v| v.sample(r)));
        st.w = Some(cfg.init.w.as_ref().map_or_else(|| vec![0.0; r.len()], |w| w.sample(r)));
    }
    st
}

/// Sample the initial data and evaluate everything fixed at `t = 0`.
///
/// With a vacuum radius `r₀`, `ρ₀` and `P₀` must vanish at every node of
/// `[0, r₀]` and `C₀ = ∫₀^{r₀} B₀ dr` must be nonzero. Velocities in the
/// vacuum are then replaced by the vacuum balance, and for the free surface
/// the outer velocity is set so that the stress condition holds.
pub fn init_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let grid = RadialGrid::uniform(cfg.n, cfg.r_outer)?;
    let mut state = sample_profiles(cfg, &grid);
    let geometry = cfg.physics.geometry;
    state.pin_boundaries(!geometry.is_free());
    state.ensure_finite()?;

    let rho_max = state.rho.iter().copied().fold(0.0, f64::max);
    if !(rho_max > 0.0) {
        return Err(Error::Config("initial density vanishes everywhere".into()));
    }
    if cfg.solver.eps_vac > 1e-3 * rho_max {
        return Err(Error::Config(format!(
            "eps_vac = {} must not exceed 1e-3 max rho0 = {}",
            cfg.solver.eps_vac,
            1e-3 * rho_max
        )));
    }

    let front = match cfg.r0 {
        None => None,
        Some(r0) => {
            let inside = |i: usize| grid.r(i) <= r0 && (state.rho[i] != 0.0 || state.p[i] != 0.0);
            if let Some(i) = (0..grid.len()).find(|&i| inside(i)) {
                return Err(Error::Config(format!(
                    "rho0 and P0 must vanish on [0, r0]; node {i} at r = {} has rho = {}, P = {}",
                    grid.r(i),
                    state.rho[i],
                    state.p[i]
                )));
            }
            let c0 = flux_upto(&state.b, r0, &grid);
            if c0.abs() < MIN_FLUX {
                return Err(Error::Config(format!("degenerate vacuum flux C0 = {c0:e}")));
            }
            Some(VacuumFront::new(r0, c0)?)
        }
    };

    solve_vacuum_balance(&mut state, &cfg.physics, &grid, &cfg.solver)?;
    if geometry.is_free() {
        enforce_stress_bc(&mut state, &grid, &cfg.physics);
    }
    state.check_invariants(!geometry.is_free())?;

    let e0 = total_energy(&state, &grid, &cfg.physics);
    let c0 = front.map_or(0.0, |f| f.c0);
    let bounds = bound_summary(cfg, c0, e0)?;
    Ok(Scenario { grid, state, front, bounds, rho_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    const DISK: &str = "geometry = \"disk2d\"\n\
        grid.n = 256\n\
        init.r0 = 0.5\n\
        init.rho = \"bump 0.5 0.9 1.0 on 0.5 0.7; constant 1.0 on 0.7 end\"\n\
        init.p = \"bump 0.5 0.9 1.0 on 0.5 0.7; constant 1.0 on 0.7 end\"\n\
        init.b = \"poly 0 1 -1\"\n";

    #[test]
    fn disk_vacuum_flux() {
        let sc = init_scenario(&parse_config(DISK).unwrap()).unwrap();
        let front = sc.front.unwrap();
        assert!((front.c0 - 1.0 / 12.0).abs() < 1e-5, "{}", front.c0);
        assert_eq!(front.r, 0.5);
        assert!(sc.bounds.t_bound.is_finite() && sc.bounds.t_bound > 0.0);
    }

    #[test]
    fn quiescent_without_vacuum() {
        let sc = init_scenario(&parse_config("").unwrap()).unwrap();
        assert!(sc.front.is_none());
        assert_eq!(sc.bounds.t_bound, f64::INFINITY);
    }

    #[test]
    fn rejects_bad_vacuum_data() {
        let mut cfg = parse_config(DISK).unwrap();
        cfg.r0 = Some(1.2);
        assert!(matches!(init_scenario(&cfg), Err(Error::Config(_))));
        let mut cfg = parse_config(DISK).unwrap();
        cfg.init.rho = crate::profile::Profile::constant(1.0);
        assert!(matches!(init_scenario(&cfg), Err(Error::Config(_))));
        let mut cfg = parse_config(DISK).unwrap();
        cfg.init.b = crate::profile::Profile::zero();
        assert!(matches!(init_scenario(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn overrides_replace_bound_inputs() {
        let mut cfg = parse_config(DISK).unwrap();
        cfg.physics.mu = 1.0;
        cfg.bounds.c0 = Some(1.0);
        cfg.bounds.e0 = Some(1.0);
        cfg.bounds.alpha = Some(1.5);
        let sc = init_scenario(&cfg).unwrap();
        assert!((sc.bounds.t_bound / 1_108.922_925_088_707_4 - 1.0).abs() < 1e-12);
    }
}
