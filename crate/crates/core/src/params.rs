use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetry class and boundary type of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// 2D radially symmetric disk, Dirichlet wall at `R₀`.
    Disk2D,
    /// 3D cylinder periodic in `x₃`, with swirl `v` and axial velocity `w`.
    Cylinder3D,
    /// 2D radially symmetric disk with a stress-free moving outer surface.
    Disk2DFree,
}

impl Geometry {
    /// Spatial dimension `d` entering the viscosity restriction.
    pub fn dimension(self) -> u32 {
        match self {
            Geometry::Cylinder3D => 3,
            _ => 2,
        }
    }

    pub fn has_swirl(self) -> bool {
        self == Geometry::Cylinder3D
    }

    pub fn is_free(self) -> bool {
        self == Geometry::Disk2DFree
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disk2d" | "disk" => Ok(Geometry::Disk2D),
            "cylinder3d" | "cylinder" => Ok(Geometry::Cylinder3D),
            "disk2d_free" | "disk2dfree" | "free" => Ok(Geometry::Disk2DFree),
            other => Err(Error::Config(format!("unknown geometry {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Disk2D => "disk2d",
            Geometry::Cylinder3D => "cylinder3d",
            Geometry::Disk2DFree => "disk2d_free",
        }
    }
}

/// Viscosities `μ`, `λ`, adiabatic exponent `γ` and geometry tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub mu: f64,
    pub lam: f64,
    pub gamma: f64,
    pub geometry: Geometry,
}

impl PhysParams {
    pub fn new(mu: f64, lam: f64, gamma: f64, geometry: Geometry) -> Result<Self> {
        let p = Self { mu, lam, gamma, geometry };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        let d = self.geometry.dimension() as f64;
        if self.mu * 2.0 / d + self.lam < 0.0 {
            return Err(Error::Config(format!(
                "viscosity restriction 2mu/{d} + lambda >= 0 violated (mu={}, lambda={})",
                self.mu, self.lam
            )));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::Config(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Longitudinal viscosity `2μ + λ`.
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lam
    }
}
