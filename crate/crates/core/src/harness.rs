//! Run orchestration: time loop, diagnostics history, blow-up detection and
//! the CSV/JSON outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ScenarioConfig;
use crate::diagnostics::{
    div_lower_bound, div_norm, dissipation_rate, moment_pair, pointwise_divergence_slack, total_energy,
    DiagnosticsRecord,
};
use crate::error::{Error, Result};
use crate::free_boundary::growth_check;
use crate::grid::RadialGrid;
use crate::mms::Manufactured;
use crate::params::Geometry;
use crate::scenario::{init_scenario, Scenario};
use crate::solver::{cfl_dt, detect_blowup, max_grad_u, solve_vacuum_balance, step_with, BlowupStatus, StepExtras};
use crate::state::FluidState;
use crate::vacuum::{advance_front_between, check_vacuum, impose_vacuum, vacuum_flux, VacuumFront};

/// Column order of the run CSV.
pub const CSV_HEADER: &str =
    "t,energy,dissipation_cum,flux_vacuum,R_front,a_boundary,div_l2,div_lower_bound,moment_lhs,moment_rhs,max_gradu,dt";

/// Relative vacuum tolerance: `check_vacuum` uses `VACUUM_TOL · max ρ₀`.
pub const VACUUM_TOL: f64 = 1e-6;
/// Two-sided energy tolerance of the free-surface identity.
pub const FREE_ENERGY_TOL: f64 = 2e-3;
/// A free-surface run is invalidated once the energy residual exceeds
/// `INVALIDATE_FACTOR · FREE_ENERGY_TOL` on this many consecutive records.
pub const INVALIDATE_RECORDS: usize = 10;
pub const INVALIDATE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Running,
    Completed,
    BlowupDetected,
    Invalidated,
    Error,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Running => "Running",
            RunStatus::Completed => "Completed",
            RunStatus::BlowupDetected => "BlowupDetected",
            RunStatus::Invalidated => "Invalidated",
            RunStatus::Error => "Error",
        }
    }

    /// Process exit code of the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::Running | RunStatus::Error => 1,
            RunStatus::BlowupDetected => 2,
            RunStatus::Invalidated => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub t_final: f64,
    pub t_detected: Option<f64>,
    pub steps: usize,
    /// Reason for detection, invalidation or error.
    pub message: Option<String>,
    pub summary: BTreeMap<String, f64>,
}

/// Running aggregates over the records.
#[derive(Debug, Clone, Default)]
struct Ledger {
    flux_max: f64,
    vacuum_max: f64,
    leaked_mass: f64,
    leaked_pressure: f64,
    clipped_mass: f64,
    clipped_pressure: f64,
    stress_max: f64,
    energy_two_sided: f64,
    energy_creation: f64,
    energy_last: f64,
    div_checked: usize,
    div_satisfied: usize,
    chain_gap_max: f64,
    pointwise_min: f64,
    over_tolerance: usize,
}

pub struct Runner {
    cfg: ScenarioConfig,
    scenario: Scenario,
    forcing: Option<Manufactured>,
    history: Vec<DiagnosticsRecord>,
    ledger: Ledger,
    steps: usize,
    status: RunStatus,
    t_detected: Option<f64>,
    message: Option<String>,
}

fn rel(x: f64, scale: f64) -> f64 {
    if scale != 0.0 {
        x / scale.abs()
    } else {
        x
    }
}

impl Runner {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        let scenario = init_scenario(&cfg)?;
        let forcing = cfg.manufactured.then(|| Manufactured::new(cfg.r_outer, &cfg.physics));
        let mut runner = Self {
            cfg,
            scenario,
            forcing,
            history: Vec::new(),
            ledger: Ledger { pointwise_min: f64::INFINITY, ..Ledger::default() },
            steps: 0,
            status: RunStatus::Running,
            t_detected: None,
            message: None,
        };
        let first = runner.record(0.0, None, None)?;
        runner.push(first);
        Ok(runner)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.scenario.grid
    }

    pub fn state(&self) -> &FluidState {
        &self.scenario.state
    }

    pub fn front(&self) -> Option<&VacuumFront> {
        self.scenario.front.as_ref()
    }

    pub fn time(&self) -> f64 {
        self.scenario.state.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn status(&self) -> RunStatus {
        self.status
    }

    /// Every record, one per step plus the initial one.
    pub fn history(&self) -> &[DiagnosticsRecord] {
        &self.history
    }

    pub fn latest(&self) -> &DiagnosticsRecord {
        self.history.last().expect("initial record present")
    }

    fn finish(&mut self, status: RunStatus, message: Option<String>) {
        self.status = status;
        self.message = message;
        if status == RunStatus::BlowupDetected {
            self.t_detected = Some(self.time());
        }
    }

    /// Advance one time step. Returns `false` once the run has ended.
    pub fn advance(&mut self) -> bool {
        if self.status != RunStatus::Running {
            return false;
        }
        if let Err(e) = self.try_advance() {
            match e {
                Error::Numerical { .. } | Error::Singular(_) => {
                    self.finish(RunStatus::BlowupDetected, Some(e.to_string()))
                }
                // a collapse on the initial data is a configuration problem
                Error::DtCollapse(_) if self.steps > 0 => {
                    self.finish(RunStatus::BlowupDetected, Some(e.to_string()))
                }
                _ => self.finish(RunStatus::Error, Some(e.to_string())),
            }
        }
        self.status == RunStatus::Running
    }

    fn try_advance(&mut self) -> Result<()> {
        let (p, s) = (&self.cfg.physics.clone(), &self.cfg.solver.clone());
        let (n, t_end) = (self.cfg.n, self.cfg.t_end);
        let remaining = t_end - self.time();
        let dt = cfl_dt(&self.scenario.state, &self.scenario.grid, p, s)?.min(remaining);
        let extras = StepExtras {
            forcing: self.forcing.as_ref().map(|f| f as &dyn crate::solver::Forcing),
            transport: None,
        };
        let out = step_with(&self.scenario.state, dt, p, &self.scenario.grid, s, &extras)?;
        let grid_new = if p.geometry.is_free() {
            RadialGrid::uniform(n, out.a).map_err(|_| Error::GeometryCollapse(out.a))?
        } else {
            self.scenario.grid.clone()
        };
        let mut state = out.state;
        let mut vacuum = None;
        if let Some(front) = self.scenario.front {
            let moved = advance_front_between(&front, &self.scenario.state, &self.scenario.grid, &state, &grid_new, dt)?;
            let check = check_vacuum(&state, &moved, &grid_new, VACUUM_TOL * self.scenario.rho_max);
            let (dm, dp) = impose_vacuum(&mut state, &moved, &grid_new);
            self.ledger.leaked_mass += dm;
            self.ledger.leaked_pressure += dp;
            solve_vacuum_balance(&mut state, p, &grid_new, s)?;
            self.scenario.front = Some(moved);
            vacuum = Some(check);
        }
        self.ledger.clipped_mass += out.clipped_mass;
        self.ledger.clipped_pressure += out.clipped_pressure;
        self.scenario.state = state;
        self.scenario.grid = grid_new;
        self.steps += 1;

        let stress = p.geometry.is_free().then_some(out.stress_residual);
        let rec = self.record(dt, vacuum.as_ref().map(|c| (c.max_rho, c.max_p)), stress)?;
        self.push(rec);

        if let BlowupStatus::Suspected(why) = detect_blowup(&self.scenario.state, &self.scenario.grid, p, s) {
            self.finish(RunStatus::BlowupDetected, Some(why));
        } else if p.geometry.is_free() && self.ledger.over_tolerance >= INVALIDATE_RECORDS {
            self.finish(
                RunStatus::Invalidated,
                Some(format!(
                    "energy identity residual above {} for {INVALIDATE_RECORDS} consecutive records",
                    INVALIDATE_FACTOR * FREE_ENERGY_TOL
                )),
            );
        } else if self.time() >= t_end {
            self.finish(RunStatus::Completed, None);
        }
        Ok(())
    }

    fn record(&self, dt: f64, vacuum: Option<(f64, f64)>, stress: Option<f64>) -> Result<DiagnosticsRecord> {
        let (st, grid, p) = (&self.scenario.state, &self.scenario.grid, &self.cfg.physics);
        let rate = dissipation_rate(st, grid, p);
        let dissipation_cum = match self.history.last() {
            Some(prev) => prev.dissipation_cum + 0.5 * dt * (prev.dissipation_rate + rate),
            None => 0.0,
        };
        let free = p.geometry.is_free();
        let bounds = self.scenario.bounds.inputs(&self.cfg);
        let mut rec = DiagnosticsRecord {
            t: st.t,
            energy: total_energy(st, grid, p),
            dissipation_rate: rate,
            dissipation_cum,
            div_l2: div_norm(st, grid),
            max_gradu: max_grad_u(st, grid),
            dt,
            a_boundary: free.then(|| grid.r_outer()),
            stress_residual: stress,
            pointwise_slack: (p.geometry == Geometry::Cylinder3D).then(|| pointwise_divergence_slack(st, grid)),
            ..DiagnosticsRecord::default()
        };
        if let Some(front) = &self.scenario.front {
            let m = moment_pair(st, front.r, grid, p, bounds.alpha)?;
            rec.moment_lhs = Some(m.lhs);
            rec.moment_rhs = Some(m.rhs);
            rec.flux_vacuum = Some(vacuum_flux(st, front, grid));
            rec.r_front = Some(front.r);
            rec.div_lower_bound = Some(div_lower_bound(&bounds, grid.r_outer())?);
            if let Some((rho, pr)) = vacuum {
                rec.vacuum_max_rho = Some(rho);
                rec.vacuum_max_p = Some(pr);
            }
        }
        Ok(rec)
    }

    fn push(&mut self, rec: DiagnosticsRecord) {
        let l = &mut self.ledger;
        let e0 = self.history.first().map_or(rec.energy, |r| r.energy);
        let resid = rel(rec.energy + rec.dissipation_cum - e0, e0);
        l.energy_last = resid;
        l.energy_two_sided = l.energy_two_sided.max(resid.abs());
        l.energy_creation = l.energy_creation.max(resid);
        if resid.abs() > INVALIDATE_FACTOR * FREE_ENERGY_TOL {
            l.over_tolerance += 1;
        } else {
            l.over_tolerance = 0;
        }
        if let (Some(flux), Some(front)) = (rec.flux_vacuum, self.scenario.front) {
            l.flux_max = l.flux_max.max(rel(flux - front.c0, front.c0).abs());
        }
        if let (Some(rho), Some(pr)) = (rec.vacuum_max_rho, rec.vacuum_max_p) {
            l.vacuum_max = l.vacuum_max.max(rho.max(pr) / self.scenario.rho_max);
        }
        if let Some(s) = rec.stress_residual {
            l.stress_max = l.stress_max.max(s);
        }
        if let Some(bound) = rec.div_lower_bound {
            l.div_checked += 1;
            if rec.div_l2 >= 0.9 * bound {
                l.div_satisfied += 1;
            }
        }
        if let (Some(lhs), Some(rhs)) = (rec.moment_lhs, rec.moment_rhs) {
            let scale = lhs.abs().max(rhs.abs());
            if scale > 0.0 {
                l.chain_gap_max = l.chain_gap_max.max((lhs - rhs).abs() / scale);
            }
        }
        if let Some(slack) = rec.pointwise_slack {
            l.pointwise_min = l.pointwise_min.min(slack);
        }
        self.history.push(rec);
    }

    /// Advance until the run ends and return its outcome.
    pub fn run_to_end(&mut self) -> Result<RunOutcome> {
        while self.advance() {}
        Ok(self.outcome())
    }

    /// Fraction of vacuum records with `div_l2 ≥ 0.9 · div_lower_bound`.
    pub fn div_bound_fraction(&self) -> Option<f64> {
        let l = &self.ledger;
        (l.div_checked > 0).then(|| l.div_satisfied as f64 / l.div_checked as f64)
    }

    /// Largest `|flux − C₀|/|C₀|` over the records.
    pub fn flux_residual(&self) -> Option<f64> {
        self.scenario.front.map(|_| self.ledger.flux_max)
    }

    /// Largest `max(ρ, P)/max ρ₀` inside the front before masking.
    pub fn vacuum_residual(&self) -> Option<f64> {
        self.scenario.front.map(|_| self.ledger.vacuum_max)
    }

    /// Energy residual: two-sided for the free surface, energy creation only
    /// for walls.
    pub fn energy_residual(&self) -> f64 {
        if self.cfg.physics.geometry.is_free() {
            self.ledger.energy_two_sided
        } else {
            self.ledger.energy_creation.max(0.0)
        }
    }

    pub fn outcome(&self) -> RunOutcome {
        let l = &self.ledger;
        let mut m = BTreeMap::new();
        m.insert("steps".to_string(), self.steps as f64);
        m.insert("energy_residual_two_sided".to_string(), l.energy_two_sided);
        m.insert("energy_creation".to_string(), l.energy_creation.max(0.0));
        m.insert("energy_residual_last".to_string(), l.energy_last);
        m.insert("clipped_mass".to_string(), l.clipped_mass);
        m.insert("clipped_pressure".to_string(), l.clipped_pressure);
        m.insert("max_gradu".to_string(), self.history.iter().map(|r| r.max_gradu).fold(0.0, f64::max));
        m.insert("min_dt".to_string(), self.history.iter().skip(1).map(|r| r.dt).fold(f64::INFINITY, f64::min));
        if self.scenario.front.is_some() {
            m.insert("flux_residual_max".to_string(), l.flux_max);
            m.insert("vacuum_residual_max".to_string(), l.vacuum_max);
            m.insert("vacuum_leaked_mass".to_string(), l.leaked_mass);
            m.insert("vacuum_leaked_pressure".to_string(), l.leaked_pressure);
            m.insert("moment_identity_gap_max".to_string(), l.chain_gap_max);
            if let Some(f) = self.div_bound_fraction() {
                m.insert("div_bound_fraction".to_string(), f);
            }
        }
        if self.cfg.physics.geometry.is_free() {
            m.insert("stress_residual_max".to_string(), l.stress_max);
            m.insert("a_final".to_string(), self.grid().r_outer());
            if let Ok(g) = growth_check(&self.history, self.cfg.r_outer, self.scenario.bounds.e0, &self.cfg.physics) {
                m.insert("growth_worst_excess".to_string(), g.worst_excess);
                m.insert("growth_pass".to_string(), if g.pass { 1.0 } else { 0.0 });
            }
        }
        if self.cfg.physics.geometry == Geometry::Cylinder3D {
            m.insert("pointwise_slack_min".to_string(), l.pointwise_min);
        }
        RunOutcome {
            status: self.status,
            t_final: self.time(),
            t_detected: self.t_detected,
            steps: self.steps,
            message: self.message.clone(),
            summary: m,
        }
    }

    /// CSV with one row per `output.stride` steps, plus the last record.
    pub fn csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.history.len() / self.cfg.output_stride + 2));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let last = self.history.len() - 1;
        for (k, r) in self.history.iter().enumerate() {
            if k % self.cfg.output_stride != 0 && k != last {
                continue;
            }
            let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:?}"));
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{},{},{},{:?},{},{},{},{:?},{:?}",
                r.t,
                r.energy,
                r.dissipation_cum,
                opt(r.flux_vacuum),
                opt(r.r_front),
                opt(r.a_boundary),
                r.div_l2,
                opt(r.div_lower_bound),
                opt(r.moment_lhs),
                opt(r.moment_rhs),
                r.max_gradu,
                r.dt
            );
        }
        out
    }

    /// Run summary as JSON. Infinite bounds serialize as `null`.
    pub fn json(&self) -> Value {
        let o = self.outcome();
        let b = &self.scenario.bounds;
        let finite = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        json!({
            "status": o.status.name(),
            "t_final": o.t_final,
            "T_detected": o.t_detected,
            "alpha_star": b.alpha_star,
            "T_bound": finite(b.t_bound),
            "C0": b.c0,
            "E0": b.e0,
            "C_envelope": b.c_envelope,
            "residuals": {
                "energy": self.energy_residual(),
                "flux": self.flux_residual(),
                "vacuum": self.vacuum_residual(),
            },
            "steps": o.steps,
            "message": o.message,
            "summary": o.summary,
        })
    }

    /// Write `run.csv` and `run.json` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("run.csv"), self.csv())?;
        let text = serde_json::to_string_pretty(&self.json()).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(dir.join("run.json"), text + "\n")?;
        Ok(())
    }
}

/// Run a configuration to the end.
pub fn run(cfg: ScenarioConfig) -> Result<(Runner, RunOutcome)> {
    let mut runner = Runner::new(cfg)?;
    let outcome = runner.run_to_end()?;
    Ok((runner, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn quiescent_run_completes() {
        let cfg = parse_config("grid.n = 32\ntime.t_end = 0.05\nphysics.mu = 0.1\n").unwrap();
        let (runner, out) = run(cfg).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert!((out.t_final - 0.05).abs() < 1e-14);
        assert!(runner.energy_residual() < 1e-12);
        let csv = runner.csv();
        assert!(csv.starts_with(CSV_HEADER));
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row.split(',').count(), 12);
        assert!(row.contains(",,,"));
    }

    #[test]
    fn unreachable_dt_min_is_an_error() {
        let cfg = parse_config("grid.n = 32\nsolver.dt_min = 1e3\n").unwrap();
        let (_, out) = run(cfg).unwrap();
        assert_eq!(out.status, RunStatus::Error);
        assert_eq!(out.status.exit_code(), 1);
    }

    #[test]
    fn outputs_are_deterministic() {
        let text = "grid.n = 32\ntime.t_end = 0.02\ninit.u = \"poly 0 0.1 -0.1\"\n";
        let (a, _) = run(parse_config(text).unwrap()).unwrap();
        let (b, _) = run(parse_config(text).unwrap()).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.json().to_string(), b.json().to_string());
    }
}
