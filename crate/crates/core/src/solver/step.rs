use super::momentum::{implicit_momentum, solve_vacuum_balance, stress_free_velocity};
use super::rhs::{rhs, Forcing, RhsOptions};
use super::{Scheme, SolverSettings, Tendency};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::PhysParams;
use crate::state::FluidState;

/// Optional inputs of a step beyond the plain nonlinear system.
#[derive(Clone, Copy, Default)]
pub struct StepExtras<'a> {
    pub forcing: Option<&'a dyn Forcing>,
    /// Prescribed transport velocity for each tendency evaluation of the
    /// step, in order. Turns the step into one of the linearized system.
    /// [`StepOutput::stage_velocities`] of a previous step has this layout.
    pub transport: Option<&'a [Vec<f64>]>,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: FluidState,
    /// Outer radius after the step; moves only for the free geometry.
    pub a: f64,
    /// `∫ρ⁻ r dr` removed by clipping during the step.
    pub clipped_mass: f64,
    pub clipped_pressure: f64,
    /// Largest `|½B² + P − (2μ+λ)(u_r + u/r)|` at the free surface after any
    /// stage, relative to the local stress scale (zero for walls).
    pub stress_residual: f64,
    /// Velocity seen by each tendency evaluation, in order.
    pub stage_velocities: Vec<Vec<f64>>,
}

/// Tendency evaluations per step of `scheme`.
pub fn tendency_evaluations(scheme: Scheme) -> usize {
    match scheme {
        Scheme::Ssprk3ExplicitViscous => 3,
        Scheme::Rk2ImplicitViscous => 6,
    }
}

/// Advance the state by `dt` on a fixed wall grid.
pub fn step(
    state: &FluidState,
    dt: f64,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<FluidState> {
    step_with(state, dt, p, grid, s, &StepExtras::default()).map(|o| o.state)
}

/// State carried through the stages: fields plus the outer radius.
#[derive(Clone)]
struct Stage {
    q: FluidState,
    a: f64,
}

struct Stepper<'a> {
    p: &'a PhysParams,
    s: &'a SolverSettings,
    cells: usize,
    extras: &'a StepExtras<'a>,
    stage_velocities: Vec<Vec<f64>>,
    clipped_mass: f64,
    clipped_pressure: f64,
    stress_residual: f64,
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn blend(y: &mut [f64], wy: f64, x: &[f64], wx: f64) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y = wy * *y + wx * x);
}

fn blend_opt(y: &mut Option<Vec<f64>>, wy: f64, x: &Option<Vec<f64>>, wx: f64) {
    if let (Some(y), Some(x)) = (y.as_mut(), x.as_ref()) {
        blend(y, wy, x, wx);
    }
}

impl Stepper<'_> {
    fn grid(&self, a: f64) -> Result<RadialGrid> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::GeometryCollapse(a));
        }
        RadialGrid::uniform(self.cells, a)
    }

    fn tendency(&mut self, y: &Stage, explicit_only: bool) -> Result<(Tendency, f64)> {
        let grid = self.grid(y.a)?;
        let free = self.p.geometry.is_free();
        let a_t = if free { y.q.u[y.q.last()] } else { 0.0 };
        let k = self.stage_velocities.len();
        self.stage_velocities.push(y.q.u.clone());
        let transport = match self.extras.transport {
            None => None,
            Some(c) => Some(c.get(k).ok_or_else(|| {
                Error::Config(format!("prescribed transport has {} stages, step needs more", c.len()))
            })?),
        };
        let opts = RhsOptions {
            transport: transport.map(|v| v.as_slice()),
            grid_velocity: if free { a_t / y.a } else { 0.0 },
            forcing: self.extras.forcing,
            explicit_only,
        };
        Ok((rhs(&y.q, self.p, &grid, self.s, &opts)?, a_t))
    }

    fn euler(&mut self, y: &Stage, dt: f64, explicit_only: bool) -> Result<Stage> {
        let (k, a_t) = self.tendency(y, explicit_only)?;
        let mut out = y.clone();
        axpy(&mut out.q.rho, dt, &k.rho);
        axpy(&mut out.q.u, dt, &k.u);
        axpy(&mut out.q.p, dt, &k.p);
        axpy(&mut out.q.b, dt, &k.b);
        if let (Some(v), Some(kv)) = (out.q.v.as_mut(), k.v.as_ref()) {
            axpy(v, dt, kv);
        }
        if let (Some(w), Some(kw)) = (out.q.w.as_mut(), k.w.as_ref()) {
            axpy(w, dt, kw);
        }
        out.a += dt * a_t;
        out.q.t += dt;
        Ok(out)
    }

    fn combine(y: &mut Stage, wy: f64, x: &Stage, wx: f64) {
        blend(&mut y.q.rho, wy, &x.q.rho, wx);
        blend(&mut y.q.u, wy, &x.q.u, wx);
        blend(&mut y.q.p, wy, &x.q.p, wx);
        blend(&mut y.q.b, wy, &x.q.b, wx);
        blend_opt(&mut y.q.v, wy, &x.q.v, wx);
        blend_opt(&mut y.q.w, wy, &x.q.w, wx);
        y.a = wy * y.a + wx * x.a;
        y.q.t = wy * y.q.t + wx * x.q.t;
    }

    /// Boundary pins, clipping, vacuum balance and the free-surface stress
    /// condition after a stage.
    fn finish_stage(&mut self, y: &mut Stage) -> Result<()> {
        let grid = self.grid(y.a)?;
        let free = self.p.geometry.is_free();
        y.q.pin_boundaries(!free);
        let (dm, dp) = y.q.clip_nonnegative(grid.quad_weights(), grid.nodes());
        self.clipped_mass += dm;
        self.clipped_pressure += dp;
        solve_vacuum_balance(&mut y.q, self.p, &grid, self.s)?;
        if free {
            let n = y.q.last();
            y.q.u[n] = stress_free_velocity(&y.q, &grid, self.p);
            let res = crate::free_boundary::stress_residual_scaled(&y.q, &grid, self.p);
            self.stress_residual = self.stress_residual.max(res);
        }
        y.q.ensure_finite()
    }

    fn ssprk3(&mut self, y0: &Stage, dt: f64, explicit_only: bool) -> Result<Stage> {
        let mut y1 = self.euler(y0, dt, explicit_only)?;
        self.finish_stage(&mut y1)?;
        let mut y2 = self.euler(&y1, dt, explicit_only)?;
        Self::combine(&mut y2, 0.25, y0, 0.75);
        self.finish_stage(&mut y2)?;
        let mut y3 = self.euler(&y2, dt, explicit_only)?;
        Self::combine(&mut y3, 2.0 / 3.0, y0, 1.0 / 3.0);
        self.finish_stage(&mut y3)?;
        Ok(y3)
    }

    fn implicit(&mut self, y: &mut Stage, dt: f64) -> Result<()> {
        let grid = self.grid(y.a)?;
        implicit_momentum(&mut y.q, dt, self.p, &grid, self.s)?;
        self.finish_stage(y)
    }
}

/// Advance by `dt` with optional forcing or prescribed transport.
///
/// For the free geometry `grid` is the current physical grid `[0, a]`; the
/// mesh moves affinely with the surface and the returned
/// [`StepOutput::a`] is the new radius.
pub fn step_with(
    state: &FluidState,
    dt: f64,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
    extras: &StepExtras<'_>,
) -> Result<StepOutput> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    if state.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: state.len() });
    }
    if state.len() < 9 {
        return Err(Error::Config("the solver needs at least 8 cells".into()));
    }
    if let Some(c) = extras.transport.and_then(|c| c.iter().find(|c| c.len() != state.len())) {
        return Err(Error::LengthMismatch { expected: state.len(), got: c.len() });
    }
    let mut st = Stepper {
        p,
        s,
        cells: grid.cells(),
        extras,
        stage_velocities: Vec::new(),
        clipped_mass: 0.0,
        clipped_pressure: 0.0,
        stress_residual: 0.0,
    };
    let y0 = Stage { q: state.clone(), a: grid.r_outer() };
    let y = match s.scheme {
        Scheme::Ssprk3ExplicitViscous => st.ssprk3(&y0, dt, false)?,
        Scheme::Rk2ImplicitViscous => {
            let mut y = st.ssprk3(&y0, 0.5 * dt, true)?;
            st.implicit(&mut y, dt)?;
            st.ssprk3(&y, 0.5 * dt, true)?
        }
    };
    let Stage { mut q, a } = y;
    q.t = state.t + dt;
    q.check_invariants(!p.geometry.is_free())?;
    Ok(StepOutput {
        state: q,
        a,
        clipped_mass: st.clipped_mass,
        clipped_pressure: st.clipped_pressure,
        stress_residual: st.stress_residual,
        stage_velocities: st.stage_velocities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::l2_norm;
    use crate::params::Geometry;

    fn setup(n: usize, geometry: Geometry, scheme: Scheme) -> (RadialGrid, PhysParams, SolverSettings) {
        let g = RadialGrid::uniform(n, 1.0).unwrap();
        let p = PhysParams::new(0.5, 0.0, 1.4, geometry).unwrap();
        let s = SolverSettings { scheme, ..SolverSettings::default() };
        (g, p, s)
    }

    #[test]
    fn quiescent_fixed_point() {
        for scheme in [Scheme::Ssprk3ExplicitViscous, Scheme::Rk2ImplicitViscous] {
            for geometry in [Geometry::Disk2D, Geometry::Cylinder3D] {
                let (g, p, s) = setup(32, geometry, scheme);
                let mut st = FluidState::zeros(g.len(), geometry);
                st.rho.fill(1.0);
                st.p.fill(0.7);
                let out = step(&st, 1e-3, &p, &g, &s).unwrap();
                assert_eq!(out.rho, st.rho);
                assert_eq!(out.u, st.u);
                assert_eq!(out.p, st.p);
                assert_eq!(out.b, st.b);
                assert!((out.t - 1e-3).abs() < 1e-18);
            }
        }
    }

    #[test]
    fn viscous_decay_nonincreasing() {
        let (g, p, s) = setup(64, Geometry::Disk2D, Scheme::Ssprk3ExplicitViscous);
        let mut st = FluidState::zeros(g.len(), Geometry::Disk2D);
        st.rho.fill(1.0);
        st.u = g.nodes().iter().map(|r| r * (1.0 - r) * (1.0 - r) * 0.01).collect();
        let mut last = l2_norm(&st.u, &g);
        for _ in 0..50 {
            let dt = crate::solver::cfl_dt(&st, &g, &p, &s).unwrap();
            st = step(&st, dt, &p, &g, &s).unwrap();
            let now = l2_norm(&st.u, &g);
            assert!(now <= last * (1.0 + 1e-12), "{now} > {last}");
            last = now;
        }
    }

    #[test]
    fn rejects_bad_dt_and_small_grids() {
        let (g, p, s) = setup(32, Geometry::Disk2D, Scheme::Rk2ImplicitViscous);
        let st = FluidState::zeros(g.len(), Geometry::Disk2D);
        assert!(step(&st, 0.0, &p, &g, &s).is_err());
        let small = RadialGrid::uniform(4, 1.0).unwrap();
        let st = FluidState::zeros(small.len(), Geometry::Disk2D);
        assert!(step(&st, 1e-3, &p, &small, &s).is_err());
    }

    #[test]
    fn free_surface_at_rest_stays_put() {
        let (g, p, s) = setup(32, Geometry::Disk2DFree, Scheme::Rk2ImplicitViscous);
        let mut st = FluidState::zeros(g.len(), Geometry::Disk2DFree);
        st.rho.fill(1.0);
        let out = step_with(&st, 1e-2, &p, &g, &s, &StepExtras::default()).unwrap();
        assert_eq!(out.a, 1.0);
        assert_eq!(out.state.u, st.u);
    }

    #[test]
    fn ssprk3_local_error_is_high_order() {
        use crate::mms::Manufactured;
        let (g, p, s) = setup(64, Geometry::Disk2D, Scheme::Ssprk3ExplicitViscous);
        let p = PhysParams::new(0.05, 0.0, p.gamma, Geometry::Disk2D).unwrap();
        let m = Manufactured::new(1.0, &p);
        let st = m.state(&g, 0.0, &FluidState::zeros(g.len(), Geometry::Disk2D));
        let extras = StepExtras { forcing: Some(&m), transport: None };
        let one = |dt: f64| step_with(&st, dt, &p, &g, &s, &extras).unwrap().state;
        let two = |dt: f64| {
            let mid = step_with(&st, 0.5 * dt, &p, &g, &s, &extras).unwrap().state;
            step_with(&mid, 0.5 * dt, &p, &g, &s, &extras).unwrap().state
        };
        // Richardson difference isolates the temporal error on a fixed grid
        let gap = |dt: f64| {
            let (a, b) = (one(dt), two(dt));
            let d: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
            l2_norm(&d, &g)
        };
        let (coarse, fine) = (gap(8e-4), gap(4e-4));
        let order = (coarse / fine).log2();
        assert!(order > 2.9, "order {order} ({coarse:e}, {fine:e})");
    }
}
