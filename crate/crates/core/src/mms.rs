//! Manufactured solution for the fixed-wall disk and the convergence study
//! built on it.
//!
//! With `k = π/R` and `e = exp(−t)`:
//! `ρ = 1 + 0.1 e cos kr`, `u = 0.1 e sin(kr) r/R`, `P = 1 + 0.05 e cos kr`,
//! `B = 0.1 e sin kr`.

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::harness::{RunStatus, Runner};
use crate::params::PhysParams;
use crate::solver::Forcing;
use crate::state::FluidState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub r_outer: f64,
    pub nu: f64,
    pub gamma: f64,
}

/// Values and first radial derivatives of the manufactured fields.
struct Point {
    rho: f64,
    rho_r: f64,
    u: f64,
    u_r: f64,
    div: f64,
    div_r: f64,
    p: f64,
    p_r: f64,
    b: f64,
    b_r: f64,
    b_over_r: f64,
}

impl Manufactured {
    pub fn new(r_outer: f64, p: &PhysParams) -> Self {
        Self { r_outer, nu: p.nu(), gamma: p.gamma }
    }

    fn point(&self, r: f64, t: f64) -> Point {
        let big_r = self.r_outer;
        let k = std::f64::consts::PI / big_r;
        let e = (-t).exp();
        let (s, c) = (k * r).sin_cos();
        let a = 0.1 * e;
        Point {
            rho: 1.0 + a * c,
            rho_r: -a * k * s,
            u: a * s * r / big_r,
            u_r: a * (k * c * r + s) / big_r,
            div: a * (k * c * r + 2.0 * s) / big_r,
            div_r: a * (3.0 * k * c - k * k * s * r) / big_r,
            p: 1.0 + 0.5 * a * c,
            p_r: -0.5 * a * k * s,
            b: a * s,
            b_r: a * k * c,
            b_over_r: if r == 0.0 { a * k } else { a * s / r },
        }
    }

    /// Exact `(ρ, u, P, B)` at `(r, t)`.
    pub fn exact(&self, r: f64, t: f64) -> [f64; 4] {
        let q = self.point(r, t);
        [q.rho, q.u, q.p, q.b]
    }

    /// Exact state sampled on a grid.
    pub fn state(&self, grid: &RadialGrid, t: f64, template: &FluidState) -> FluidState {
        let mut st = template.clone();
        for (i, &r) in grid.nodes().iter().enumerate() {
            let [rho, u, p, b] = self.exact(r, t);
            st.rho[i] = rho;
            st.u[i] = u;
            st.p[i] = p;
            st.b[i] = b;
        }
        st.u[0] = 0.0;
        st.b[0] = 0.0;
        st.t = t;
        st
    }
}

impl Forcing for Manufactured {
    fn source(&self, r: f64, t: f64) -> [f64; 4] {
        let q = self.point(r, t);
        // every field decays like exp(−t)
        let rho_t = -(q.rho - 1.0);
        let p_t = -(q.p - 1.0);
        let s_rho = rho_t + q.rho_r * q.u + q.rho * q.div;
        let lorentz = q.b * (q.b_r + q.b_over_r);
        let s_u = -q.u + q.u * q.u_r + (q.p_r - self.nu * q.div_r + lorentz) / q.rho;
        let s_p = p_t + q.u * q.p_r + self.gamma * q.p * q.div;
        let s_b = -q.b + q.u_r * q.b + q.u * q.b_r;
        [s_rho, s_u, s_p, s_b]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    /// `L²(r dr)` errors of `ρ, u, P, B` at the final time.
    pub errors: [f64; 4],
    /// Observed orders against the previous row.
    pub order: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub t_final: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Smallest observed order over fields and refinements.
    pub fn min_order(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.order)
            .flat_map(|o| o.into_iter())
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))))
    }
}

fn l2_error(grid: &RadialGrid, num: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    let w = grid.quad_weights();
    let r = grid.nodes();
    (0..grid.len())
        .map(|i| {
            let d = num[i] - exact(r[i]);
            d * d * r[i] * w[i]
        })
        .sum::<f64>()
        .sqrt()
}

/// Errors of the manufactured solution against a numerical state.
pub fn mms_errors(m: &Manufactured, grid: &RadialGrid, state: &FluidState) -> [f64; 4] {
    let t = state.t;
    let mut out = [0.0; 4];
    for (k, field) in [&state.rho, &state.u, &state.p, &state.b].into_iter().enumerate() {
        out[k] = l2_error(grid, field, |r| m.exact(r, t)[k]);
    }
    out
}

/// Run the manufactured case at every resolution in `n_list` to
/// `cfg.t_end` and tabulate the errors and observed orders.
pub fn convergence_study(cfg: &ScenarioConfig, n_list: &[usize]) -> Result<ConvergenceTable> {
    if !cfg.manufactured {
        return Err(Error::Config("convergence study needs init.manufactured = true".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in n_list {
        let mut c = cfg.clone();
        c.n = n;
        let mut runner = Runner::new(c)?;
        let outcome = runner.run_to_end()?;
        if outcome.status != RunStatus::Completed {
            return Err(Error::Invariant(format!("manufactured run at N={n} ended {:?}", outcome.status)));
        }
        let m = Manufactured::new(cfg.r_outer, &cfg.physics);
        let errors = mms_errors(&m, runner.grid(), runner.state());
        let order = rows.last().map(|prev: &ConvergenceRow| {
            let ratio = n as f64 / prev.n as f64;
            let mut o = [0.0; 4];
            for k in 0..4 {
                o[k] = (prev.errors[k] / errors[k]).ln() / ratio.ln();
            }
            o
        });
        rows.push(ConvergenceRow { n, errors, order });
    }
    Ok(ConvergenceTable { t_final: cfg.t_end, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Geometry;

    #[test]
    fn forcing_matches_finite_differences_of_exact_fields() {
        let p = PhysParams::new(0.05, 0.0, 1.4, Geometry::Disk2D).unwrap();
        let m = Manufactured::new(1.0, &p);
        let (r, t, h) = (0.37, 0.2, 1e-5);
        let f = |r: f64, t: f64| m.exact(r, t);
        let d_t = |k: usize| (f(r, t + h)[k] - f(r, t - h)[k]) / (2.0 * h);
        let d_r = |k: usize, r: f64| (f(r + h, t)[k] - f(r - h, t)[k]) / (2.0 * h);
        let [rho, u, pr, b] = f(r, t);
        let div = |r: f64| d_r(1, r) + f(r, t)[1] / r;
        let div_r = (div(r + h) - div(r - h)) / (2.0 * h);
        let s = m.source(r, t);
        let s_rho = d_t(0) + d_r(0, r) * u + rho * div(r);
        let s_u = d_t(1) + u * d_r(1, r) + (d_r(2, r) - p.nu() * div_r + b * (d_r(3, r) + b / r)) / rho;
        let s_p = d_t(2) + u * d_r(2, r) + p.gamma * pr * div(r);
        let s_b = d_t(3) + d_r(1, r) * b + u * d_r(3, r);
        for (a, e) in s.iter().zip([s_rho, s_u, s_p, s_b]) {
            assert!((a - e).abs() < 1e-5, "{a} vs {e}");
        }
    }

    #[test]
    fn exact_data_has_zero_error() {
        let p = PhysParams::new(0.05, 0.0, 1.4, Geometry::Disk2D).unwrap();
        let m = Manufactured::new(1.0, &p);
        let g = RadialGrid::uniform(64, 1.0).unwrap();
        let st = m.state(&g, 0.0, &FluidState::zeros(g.len(), Geometry::Disk2D));
        let e = mms_errors(&m, &g, &st);
        assert!(e.iter().all(|x| *x < 1e-15), "{e:?}");
    }
}
