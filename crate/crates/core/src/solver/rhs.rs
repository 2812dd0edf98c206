use super::fd::{self, Parity};
use super::timestep::max_wave_speed;
use super::{SolverSettings, Tendency};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::{Geometry, PhysParams};
use crate::state::FluidState;

/// External source terms `(S_ρ, S_u, S_P, S_B)` added to the tendencies.
/// `S_u` is an acceleration (added after the division by `ρ⁎`).
pub trait Forcing {
    fn source(&self, r: f64, t: f64) -> [f64; 4];
}

/// Knobs for the tendency evaluation beyond the plain fixed-wall system.
#[derive(Clone, Copy, Default)]
pub struct RhsOptions<'a> {
    /// Advecting velocity for the linearized system; `None` uses `state.u`.
    pub transport: Option<&'a [f64]>,
    /// Mesh stretching rate `a'/a` of an affinely moving grid (node `i`
    /// moves with velocity `rᵢ a'/a`).
    pub grid_velocity: f64,
    pub forcing: Option<&'a dyn Forcing>,
    /// Drop pressure, Lorentz and viscous terms from the momentum tendencies
    /// (they are handled implicitly by the split scheme).
    pub explicit_only: bool,
}

/// Tendency of the fixed-wall disk system.
pub fn rhs_disk(
    state: &FluidState,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<Tendency> {
    if p.geometry == Geometry::Cylinder3D {
        return Err(Error::Config("rhs_disk called with cylinder geometry".into()));
    }
    rhs(state, p, grid, s, &RhsOptions::default())
}

/// Tendency of the fixed-wall cylinder system with swirl.
pub fn rhs_cylinder(
    state: &FluidState,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<Tendency> {
    if p.geometry != Geometry::Cylinder3D || state.v.is_none() || state.w.is_none() {
        return Err(Error::Config("rhs_cylinder needs cylinder geometry with v and w".into()));
    }
    rhs(state, p, grid, s, &RhsOptions::default())
}

fn check_finite(name: &str, f: &[f64]) -> Result<()> {
    match f.iter().position(|x| !x.is_finite()) {
        Some(node) => Err(Error::Numerical { node, msg: format!("non-finite {name} tendency") }),
        None => Ok(()),
    }
}

/// General tendency evaluation shared by every scheme and geometry.
pub fn rhs(
    state: &FluidState,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
    opts: &RhsOptions<'_>,
) -> Result<Tendency> {
    if state.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: state.len() });
    }
    state.ensure_finite()?;
    let n = state.last();
    let m = n + 1;
    let h = grid.dr();
    let r = grid.nodes();
    let c = opts.transport.unwrap_or(&state.u);
    let vac = s.vacuum_nodes(&state.rho);
    let nu = p.nu();
    let wall = !p.geometry.is_free();

    let mut scratch = vec![0.0; m];

    // continuity: ρ_t = −(ρc)_r − ρc/r
    let flux: Vec<f64> = state.rho.iter().zip(c).map(|(a, b)| a * b).collect();
    fd::ddr(&flux, h, Parity::Odd, &mut scratch);
    let mut rho_t = vec![0.0; m];
    rho_t[0] = -2.0 * scratch[0];
    for i in 1..m {
        rho_t[i] = -scratch[i] - flux[i] / r[i];
    }

    // pressure: P_t = −c P_r − γ P (c_r + c/r)
    let mut p_r = vec![0.0; m];
    fd::ddr(&state.p, h, Parity::Even, &mut p_r);
    let mut div_c = vec![0.0; m];
    fd::divergence(c, r, h, &mut div_c);
    let mut p_t: Vec<f64> = (0..m)
        .map(|i| -c[i] * p_r[i] - p.gamma * state.p[i] * div_c[i])
        .collect();

    // induction: B_t = −(cB)_r
    let cb: Vec<f64> = c.iter().zip(&state.b).map(|(a, b)| a * b).collect();
    fd::ddr(&cb, h, Parity::Even, &mut scratch);
    let mut b_t: Vec<f64> = scratch.iter().map(|d| -d).collect();

    // radial momentum
    let mut u_r = vec![0.0; m];
    fd::ddr(&state.u, h, Parity::Odd, &mut u_r);
    let mut b_r = vec![0.0; m];
    fd::ddr(&state.b, h, Parity::Odd, &mut b_r);
    let mut lap_u = vec![0.0; m];
    fd::vector_laplacian(&state.u, r, h, &mut lap_u);
    let mut u_t = vec![0.0; m];
    for i in 1..m {
        let mut bracket = -state.rho[i] * c[i] * u_r[i];
        if let Some(v) = &state.v {
            bracket += state.rho[i] * v[i] * v[i] / r[i];
        }
        if !opts.explicit_only {
            let lorentz = state.b[i] * (b_r[i] + state.b[i] / r[i]);
            bracket += -p_r[i] - lorentz + nu * lap_u[i];
        }
        u_t[i] = bracket / s.rho_star(state.rho[i]);
    }

    // swirl and axial momentum
    let (mut v_t, mut w_t) = (None, None);
    if let (Some(v), Some(w)) = (&state.v, &state.w) {
        let mut v_r = vec![0.0; m];
        fd::ddr(v, h, Parity::Odd, &mut v_r);
        let mut lap_v = vec![0.0; m];
        fd::vector_laplacian(v, r, h, &mut lap_v);
        let mut vt = vec![0.0; m];
        for i in 1..m {
            let mut bracket = -state.rho[i] * (c[i] * v_r[i] + c[i] * v[i] / r[i]);
            if !opts.explicit_only {
                bracket += p.mu * lap_v[i];
            }
            vt[i] = bracket / s.rho_star(state.rho[i]);
        }
        let mut w_r = vec![0.0; m];
        fd::ddr(w, h, Parity::Even, &mut w_r);
        let mut lap_w = vec![0.0; m];
        fd::scalar_laplacian(w, r, h, &mut lap_w);
        let mut wt = vec![0.0; m];
        for i in 0..m {
            let mut bracket = -state.rho[i] * c[i] * w_r[i];
            if !opts.explicit_only {
                bracket += p.mu * lap_w[i];
            }
            wt[i] = bracket / s.rho_star(state.rho[i]);
        }
        if opts.grid_velocity != 0.0 {
            for i in 0..m {
                let gv = opts.grid_velocity * r[i];
                vt[i] += gv * v_r[i];
                wt[i] += gv * w_r[i];
            }
        }
        v_t = Some(vt);
        w_t = Some(wt);
    }

    // moving-mesh frame: ∂_t|_ξ q = ∂_t q + (r a'/a) q_r
    if opts.grid_velocity != 0.0 {
        let mut rho_r = vec![0.0; m];
        fd::ddr(&state.rho, h, Parity::Even, &mut rho_r);
        for i in 0..m {
            let gv = opts.grid_velocity * r[i];
            rho_t[i] += gv * rho_r[i];
            u_t[i] += gv * u_r[i];
            b_t[i] += gv * b_r[i];
            p_t[i] += gv * p_r[i];
        }
    }

    // fourth-difference dissipation on the transported fields
    if s.dissipation > 0.0 {
        let speed = max_wave_speed(state, p, s, &vac, h) + opts.grid_velocity.abs() * grid.r_outer();
        let coef = s.dissipation * speed / h;
        if coef > 0.0 {
            fd::fourth_difference(&state.rho, Parity::Even, &mut scratch);
            rho_t.iter_mut().zip(&scratch).for_each(|(t, d)| *t -= coef * d);
            fd::fourth_difference(&state.p, Parity::Even, &mut scratch);
            p_t.iter_mut().zip(&scratch).for_each(|(t, d)| *t -= coef * d);
            fd::fourth_difference(&state.b, Parity::Odd, &mut scratch);
            b_t.iter_mut().zip(&scratch).for_each(|(t, d)| *t -= coef * d);
        }
    }

    if let Some(f) = opts.forcing {
        for i in 0..m {
            let src = f.source(r[i], state.t);
            rho_t[i] += src[0];
            u_t[i] += src[1];
            p_t[i] += src[2];
            b_t[i] += src[3];
        }
    }

    // quasi-stationary vacuum nodes carry no velocity tendency
    for i in 0..m {
        if vac[i] {
            u_t[i] = 0.0;
            if let Some(vt) = v_t.as_mut() {
                vt[i] = 0.0;
            }
            if let Some(wt) = w_t.as_mut() {
                wt[i] = 0.0;
            }
        }
    }

    u_t[0] = 0.0;
    b_t[0] = 0.0;
    if let Some(vt) = v_t.as_mut() {
        vt[0] = 0.0;
    }
    // wall: Dirichlet; free surface: u[N] is set by the stress condition
    u_t[n] = 0.0;
    if wall {
        if let Some(vt) = v_t.as_mut() {
            vt[n] = 0.0;
        }
        if let Some(wt) = w_t.as_mut() {
            wt[n] = 0.0;
        }
    }

    check_finite("rho", &rho_t)?;
    check_finite("u", &u_t)?;
    check_finite("P", &p_t)?;
    check_finite("B", &b_t)?;
    if let Some(vt) = &v_t {
        check_finite("v", vt)?;
    }
    if let Some(wt) = &w_t {
        check_finite("w", wt)?;
    }
    Ok(Tendency { rho: rho_t, u: u_t, p: p_t, b: b_t, v: v_t, w: w_t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(geometry: Geometry, mu: f64) -> (RadialGrid, PhysParams, SolverSettings, FluidState) {
        let g = RadialGrid::uniform(64, 1.0).unwrap();
        let p = PhysParams::new(mu, 0.0, 1.4, geometry).unwrap();
        let s = SolverSettings { dissipation: 0.0, ..SolverSettings::default() };
        let mut st = FluidState::zeros(g.len(), geometry);
        st.rho.fill(1.0);
        (g, p, s, st)
    }

    fn interior(n: usize) -> std::ops::Range<usize> {
        2..n - 2
    }

    #[test]
    fn linear_expansion() {
        let (g, p, s, mut st) = setup(Geometry::Disk2D, 1.0);
        let c = 0.3;
        st.u = g.nodes().iter().map(|r| c * r).collect();
        let k = rhs_disk(&st, &p, &g, &s).unwrap();
        for i in interior(st.len()) {
            assert!((k.rho[i] + 2.0 * c).abs() < 1e-12, "{}", k.rho[i]);
            assert_eq!(k.p[i], 0.0);
        }
    }

    #[test]
    fn lorentz_force() {
        let (g, p, s, mut st) = setup(Geometry::Disk2D, 1.0);
        st.b = g.nodes().to_vec();
        let k = rhs_disk(&st, &p, &g, &s).unwrap();
        for i in interior(st.len()) {
            assert!((k.u[i] + 2.0 * g.r(i)).abs() < 1e-12, "{}", k.u[i]);
        }
    }

    #[test]
    fn centrifugal_and_axial_diffusion() {
        let (g, p, s, mut st) = setup(Geometry::Cylinder3D, 0.7);
        st.v = Some(g.nodes().to_vec());
        let k = rhs_cylinder(&st, &p, &g, &s).unwrap();
        for i in interior(st.len()) {
            assert!((k.u[i] - g.r(i)).abs() < 1e-12, "{}", k.u[i]);
        }
        st.v = Some(vec![0.0; st.len()]);
        st.w = Some(g.nodes().iter().map(|r| r * r).collect());
        let k = rhs_cylinder(&st, &p, &g, &s).unwrap();
        let wt = k.w.unwrap();
        for i in interior(st.len()) {
            assert!((wt[i] - 4.0 * 0.7).abs() < 1e-9, "{}", wt[i]);
        }
    }

    #[test]
    fn wrong_geometry_rejected() {
        let (g, p, s, st) = setup(Geometry::Disk2D, 1.0);
        assert!(rhs_cylinder(&st, &p, &g, &s).is_err());
    }
}
