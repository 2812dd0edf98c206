//! Method-of-lines discretization of the radially symmetric (disk) and
//! cylindrically symmetric MHD systems, with vacuum handling, time stepping,
//! blow-up detection and a Picard (successive linearization) driver.

mod blowup;
pub(crate) mod fd;
mod momentum;
mod picard;
mod rhs;
mod step;
mod timestep;
pub(crate) mod tridiag;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use blowup::{detect_blowup, max_grad_u, BlowupStatus};
pub use momentum::solve_vacuum_balance;
pub use picard::{picard_iterate, PicardReport, PicardSettings};
pub use rhs::{rhs, rhs_cylinder, rhs_disk, Forcing, RhsOptions};
pub use step::{step, step_with, StepExtras, StepOutput};
pub use timestep::cfl_dt;
pub(crate) use momentum::stress_free_velocity;

/// Time integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Three-stage SSP Runge–Kutta on the full tendency.
    Ssprk3ExplicitViscous,
    /// Strang splitting: explicit transport half steps around an implicit
    /// (TR-BDF2) momentum solve.
    Rk2ImplicitViscous,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ssprk3" | "ssprk3_explicitviscous" | "explicit" => Ok(Scheme::Ssprk3ExplicitViscous),
            "rk2_implicit" | "rk2_implicitviscous" | "implicit" => Ok(Scheme::Rk2ImplicitViscous),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ssprk3ExplicitViscous => "ssprk3",
            Scheme::Rk2ImplicitViscous => "rk2_implicit",
        }
    }
}

/// How velocity is updated where the density is (numerically) zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VacuumStrategy {
    /// Divide momentum by `max(ρ, eps_vac)`.
    DensityFloor,
    /// Replace the momentum equation on vacuum nodes by the quasi-stationary
    /// balance `(2μ+λ)(u_r + u/r)_r = B(B_r + B/r) + P_r`.
    ElipticBalance,
}

impl VacuumStrategy {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "floor" | "densityfloor" | "density_floor" => Ok(VacuumStrategy::DensityFloor),
            "elliptic" | "eliptic" | "elipticbalance" | "elliptic_balance" => {
                Ok(VacuumStrategy::ElipticBalance)
            }
            other => Err(Error::Config(format!("unknown vacuum strategy {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VacuumStrategy::DensityFloor => "floor",
            VacuumStrategy::ElipticBalance => "elliptic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub cfl: f64,
    pub scheme: Scheme,
    pub vacuum_strategy: VacuumStrategy,
    pub eps_vac: f64,
    pub blowup_gradu_max: f64,
    pub dt_min: f64,
    /// Coefficient of the fourth-difference artificial dissipation on the
    /// transported fields, in units of (max wave speed)·Δr³.
    pub dissipation: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            scheme: Scheme::Rk2ImplicitViscous,
            vacuum_strategy: VacuumStrategy::ElipticBalance,
            eps_vac: 1e-6,
            blowup_gradu_max: 1e4,
            dt_min: 1e-12,
            dissipation: 1.0 / 32.0,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0,1), got {}", self.cfl)));
        }
        if !(self.eps_vac > 0.0) {
            return Err(Error::Config("eps_vac must be positive".into()));
        }
        if !(self.blowup_gradu_max > 0.0) {
            return Err(Error::Config("blowup_gradu_max must be positive".into()));
        }
        if !(self.dt_min > 0.0) {
            return Err(Error::Config("dt_min must be positive".into()));
        }
        if !(self.dissipation >= 0.0) {
            return Err(Error::Config("dissipation must be nonnegative".into()));
        }
        Ok(())
    }

    /// Effective density in the momentum division.
    #[inline]
    pub fn rho_star(&self, rho: f64) -> f64 {
        rho.max(self.eps_vac)
    }

    /// Nodes whose velocity is fixed by the vacuum balance rather than by a
    /// time derivative. Empty unless the strategy is [`VacuumStrategy::ElipticBalance`].
    pub fn vacuum_nodes(&self, rho: &[f64]) -> Vec<bool> {
        match self.vacuum_strategy {
            VacuumStrategy::DensityFloor => vec![false; rho.len()],
            VacuumStrategy::ElipticBalance => rho.iter().map(|&r| r < self.eps_vac).collect(),
        }
    }
}

/// Time derivatives of every field of a [`crate::FluidState`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub b: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub w: Option<Vec<f64>>,
}
