//! Tridiagonal velocity solves: the quasi-stationary vacuum balance and the
//! implicit (TR-BDF2) momentum update of the split scheme.

use super::fd::{self, Parity};
use super::tridiag::Tridiagonal;
use super::{SolverSettings, VacuumStrategy};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::PhysParams;
use crate::state::FluidState;

const TRBDF2_GAMMA: f64 = 2.0 - std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Operator {
    /// `(q_r + q/r)_r` for an odd field pinned at the center.
    Vector,
    /// `(r q_r)_r / r` for an even field.
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OuterRow {
    Dirichlet,
    /// `ν(q_r + q/r) = value` with a one-sided three-point `q_r`.
    Stress,
}

/// Coefficients `(lower, diag, upper)` of `coef · op` at node `i`.
fn operator_row(op: Operator, r: &[f64], h: f64, coef: f64, i: usize) -> (f64, f64, f64) {
    let ih2 = 1.0 / (h * h);
    match op {
        Operator::Vector => {
            let a = 0.5 / (h * r[i]);
            (coef * (ih2 - a), coef * (-2.0 * ih2 - 1.0 / (r[i] * r[i])), coef * (ih2 + a))
        }
        Operator::Scalar if i == 0 => (0.0, -4.0 * coef * ih2, 4.0 * coef * ih2),
        Operator::Scalar => {
            let a = 0.5 / (h * r[i]);
            (coef * (ih2 - a), -2.0 * coef * ih2, coef * (ih2 + a))
        }
    }
}

fn apply_row(row: (f64, f64, f64), q: &[f64], i: usize) -> f64 {
    let lo = if i > 0 { row.0 * q[i - 1] } else { 0.0 };
    let up = if i + 1 < q.len() { row.2 * q[i + 1] } else { 0.0 };
    lo + row.1 * q[i] + up
}

/// One velocity component's linear problem `m q_t = coef·op(q) + f`.
struct Component<'a> {
    op: Operator,
    coef: f64,
    forcing: &'a [f64],
    outer: OuterRow,
    /// Right-hand side of the stress row.
    outer_value: f64,
}

impl Component<'_> {
    fn fill_boundaries(&self, t: &mut Tridiagonal, r: &[f64], h: f64, nu: f64) {
        let n = t.diag.len() - 1;
        if self.op == Operator::Vector {
            t.identity_row(0, 0.0);
        }
        match self.outer {
            OuterRow::Dirichlet => t.identity_row(n, 0.0),
            OuterRow::Stress => {
                let i2h = 0.5 / h;
                t.last_extra = nu * i2h;
                t.lower[n] = -4.0 * nu * i2h;
                t.diag[n] = nu * (3.0 * i2h + 1.0 / r[n]);
                t.upper[n] = 0.0;
                t.rhs[n] = self.outer_value;
            }
        }
    }

    fn first_row(&self) -> usize {
        match self.op {
            Operator::Vector => 1,
            Operator::Scalar => 0,
        }
    }

    /// Solve `coef·op(q) = −f` on the rows flagged in `balance`, holding the
    /// remaining interior nodes at their current values.
    fn balance(&self, q: &[f64], balance: &[bool], r: &[f64], h: f64, nu: f64) -> Result<Vec<f64>> {
        let m = q.len();
        let n = m - 1;
        let mut t = Tridiagonal::new(m);
        for i in self.first_row()..n {
            if balance[i] {
                let (lo, di, up) = operator_row(self.op, r, h, self.coef, i);
                t.lower[i] = lo;
                t.diag[i] = di;
                t.upper[i] = up;
                t.rhs[i] = -self.forcing[i];
            } else {
                t.identity_row(i, q[i]);
            }
        }
        self.fill_boundaries(&mut t, r, h, nu);
        if self.outer == OuterRow::Stress && !balance[n] {
            t.identity_row(n, q[n]);
        }
        t.solve()
    }

    /// TR-BDF2 step of `m q_t = coef·op(q) + f`. Rows with `m = 0` are
    /// algebraic and carry the balance in both stages.
    fn trbdf2(&self, q: &[f64], mass: &[f64], dt: f64, r: &[f64], h: f64, nu: f64) -> Result<Vec<f64>> {
        let m = q.len();
        let n = m - 1;
        let g = TRBDF2_GAMMA;
        let w = (1.0 - g) / (2.0 - g) * dt;
        let c1 = 1.0 / (g * (2.0 - g));
        let c2 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));

        let stage = |theta: f64, rhs_of: &dyn Fn(usize, (f64, f64, f64)) -> f64| -> Result<Vec<f64>> {
            let mut t = Tridiagonal::new(m);
            for i in self.first_row()..n {
                let row = operator_row(self.op, r, h, self.coef, i);
                if mass[i] == 0.0 {
                    t.lower[i] = row.0;
                    t.diag[i] = row.1;
                    t.upper[i] = row.2;
                    t.rhs[i] = -self.forcing[i];
                } else {
                    t.lower[i] = -theta * row.0;
                    t.diag[i] = mass[i] - theta * row.1;
                    t.upper[i] = -theta * row.2;
                    t.rhs[i] = rhs_of(i, row);
                }
            }
            self.fill_boundaries(&mut t, r, h, nu);
            t.solve()
        };

        let half = 0.5 * g * dt;
        let q_mid = stage(half, &|i, row| {
            mass[i] * q[i] + half * apply_row(row, q, i) + g * dt * self.forcing[i]
        })?;
        stage(w, &|i, _| mass[i] * (c1 * q_mid[i] - c2 * q[i]) + w * self.forcing[i])
    }
}

/// `−P_r − B(B_r + B/r)` at every node (zero at the center).
fn pressure_lorentz(state: &FluidState, grid: &RadialGrid) -> Vec<f64> {
    let m = state.len();
    let h = grid.dr();
    let r = grid.nodes();
    let mut p_r = vec![0.0; m];
    fd::ddr(&state.p, h, Parity::Even, &mut p_r);
    let mut b_r = vec![0.0; m];
    fd::ddr(&state.b, h, Parity::Odd, &mut b_r);
    let mut f = vec![0.0; m];
    for i in 1..m {
        f[i] = -p_r[i] - state.b[i] * (b_r[i] + state.b[i] / r[i]);
    }
    f
}

fn outer_stress(state: &FluidState) -> f64 {
    let n = state.last();
    0.5 * state.b[n] * state.b[n] + state.p[n]
}

fn check_len(state: &FluidState, grid: &RadialGrid) -> Result<()> {
    if state.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: state.len() });
    }
    if state.len() < 4 {
        return Err(Error::Config("velocity solves need at least 4 nodes".into()));
    }
    Ok(())
}

/// Boundary velocity `u[N]` for which the effective viscous flux
/// `½B² + P − (2μ+λ)(u_r + u/r)` vanishes at the outer node, with the same
/// one-sided `u_r` as the rest of the solver.
pub(crate) fn stress_free_velocity(state: &FluidState, grid: &RadialGrid, p: &PhysParams) -> f64 {
    let n = state.last();
    let h = grid.dr();
    let u = &state.u;
    let target = outer_stress(state) / p.nu();
    (target - (-4.0 * u[n - 1] + u[n - 2]) * 0.5 / h) / (1.5 / h + 1.0 / grid.r(n))
}

/// Replace the velocity on quasi-stationary vacuum nodes (`ρ < eps_vac`) by
/// the solution of the balance
/// `(2μ+λ)(u_r + u/r)_r = B(B_r + B/r) + P_r`, with `u(0) = 0` and the
/// velocity of the adjacent fluid nodes held fixed. With swirl, `v` and `w`
/// solve the corresponding homogeneous viscous balances.
///
/// Does nothing under [`VacuumStrategy::DensityFloor`].
pub fn solve_vacuum_balance(
    state: &mut FluidState,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<()> {
    check_len(state, grid)?;
    if s.vacuum_strategy != VacuumStrategy::ElipticBalance {
        return Ok(());
    }
    let vac = s.vacuum_nodes(&state.rho);
    if !vac.iter().any(|&v| v) {
        return Ok(());
    }
    let r = grid.nodes();
    let h = grid.dr();
    let nu = p.nu();
    let free = p.geometry.is_free();
    let f = pressure_lorentz(state, grid);
    let radial = Component {
        op: Operator::Vector,
        coef: nu,
        forcing: &f,
        outer: if free { OuterRow::Stress } else { OuterRow::Dirichlet },
        outer_value: outer_stress(state),
    };
    let mut u = radial.balance(&state.u, &vac, r, h, nu)?;
    u[0] = 0.0;
    state.u = u;

    let zero = vec![0.0; state.len()];
    if let Some(v) = state.v.as_mut() {
        let swirl = Component {
            op: Operator::Vector,
            coef: p.mu,
            forcing: &zero,
            outer: OuterRow::Dirichlet,
            outer_value: 0.0,
        };
        *v = swirl.balance(v, &vac, r, h, nu)?;
    }
    if let Some(w) = state.w.as_mut() {
        let axial = Component {
            op: Operator::Scalar,
            coef: p.mu,
            forcing: &zero,
            outer: OuterRow::Dirichlet,
            outer_value: 0.0,
        };
        *w = axial.balance(w, &vac, r, h, nu)?;
    }
    Ok(())
}

/// Implicit momentum update over `dt`: viscous, pressure and Lorentz terms,
/// with pressure and Lorentz forcing frozen at the incoming state. The mass
/// is `ρ⁎`, or zero on vacuum nodes under the balance strategy.
pub(crate) fn implicit_momentum(
    state: &mut FluidState,
    dt: f64,
    p: &PhysParams,
    grid: &RadialGrid,
    s: &SolverSettings,
) -> Result<()> {
    check_len(state, grid)?;
    let r = grid.nodes();
    let h = grid.dr();
    let nu = p.nu();
    let free = p.geometry.is_free();
    let vac = s.vacuum_nodes(&state.rho);
    let mass: Vec<f64> = state
        .rho
        .iter()
        .zip(&vac)
        .map(|(&rho, &v)| if v { 0.0 } else { s.rho_star(rho) })
        .collect();
    let f = pressure_lorentz(state, grid);
    let radial = Component {
        op: Operator::Vector,
        coef: nu,
        forcing: &f,
        outer: if free { OuterRow::Stress } else { OuterRow::Dirichlet },
        outer_value: outer_stress(state),
    };
    let mut u = radial.trbdf2(&state.u, &mass, dt, r, h, nu)?;
    u[0] = 0.0;
    state.u = u;

    let zero = vec![0.0; state.len()];
    if let Some(v) = state.v.as_mut() {
        let swirl = Component {
            op: Operator::Vector,
            coef: p.mu,
            forcing: &zero,
            outer: OuterRow::Dirichlet,
            outer_value: 0.0,
        };
        *v = swirl.trbdf2(v, &mass, dt, r, h, nu)?;
    }
    if let Some(w) = state.w.as_mut() {
        let axial = Component {
            op: Operator::Scalar,
            coef: p.mu,
            forcing: &zero,
            outer: OuterRow::Dirichlet,
            outer_value: 0.0,
        };
        *w = axial.trbdf2(w, &mass, dt, r, h, nu)?;
    }
    Ok(())
}
