use crate::error::{Error, Result};
use crate::params::Geometry;

/// Nodal fields `(ρ, u, v, w, P, B)` at time `t`. `v` and `w` exist only in
/// the cylinder geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub b: Vec<f64>,
    pub v: Option<Vec<f64>>,
    pub w: Option<Vec<f64>>,
    pub t: f64,
}

impl FluidState {
    /// All-zero state with `n_nodes` nodes.
    pub fn zeros(n_nodes: usize, geometry: Geometry) -> Self {
        let z = vec![0.0; n_nodes];
        let swirl = geometry.has_swirl();
        Self {
            rho: z.clone(),
            u: z.clone(),
            p: z.clone(),
            b: z.clone(),
            v: swirl.then(|| z.clone()),
            w: swirl.then_some(z),
            t: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn last(&self) -> usize {
        self.rho.len() - 1
    }

    /// Iterate over every present field with a short name.
    pub fn fields(&self) -> impl Iterator<Item = (&'static str, &[f64])> {
        [
            ("rho", Some(self.rho.as_slice())),
            ("u", Some(self.u.as_slice())),
            ("P", Some(self.p.as_slice())),
            ("B", Some(self.b.as_slice())),
            ("v", self.v.as_deref()),
            ("w", self.w.as_deref()),
        ]
        .into_iter()
        .filter_map(|(n, f)| f.map(|f| (n, f)))
    }

    /// First node holding a NaN or infinity, if any.
    pub fn first_non_finite(&self) -> Option<(usize, &'static str)> {
        for (name, f) in self.fields() {
            if let Some(i) = f.iter().position(|x| !x.is_finite()) {
                return Some((i, name));
            }
        }
        None
    }

    pub fn ensure_finite(&self) -> Result<()> {
        match self.first_non_finite() {
            Some((node, name)) => Err(Error::Numerical { node, msg: format!("non-finite {name}") }),
            None => Ok(()),
        }
    }

    /// Pin the center conditions `u(0) = B(0) = 0` (and `v(0) = 0`), plus the
    /// wall conditions when `wall` is set.
    pub fn pin_boundaries(&mut self, wall: bool) {
        let n = self.last();
        self.u[0] = 0.0;
        self.b[0] = 0.0;
        if let Some(v) = self.v.as_mut() {
            v[0] = 0.0;
        }
        if wall {
            self.u[n] = 0.0;
            if let Some(v) = self.v.as_mut() {
                v[n] = 0.0;
            }
            if let Some(w) = self.w.as_mut() {
                w[n] = 0.0;
            }
        }
    }

    /// Clip `ρ` and `P` at zero from below. Returns the clipped amounts
    /// `(Σ|ρ⁻| wᵢ rᵢ, Σ|P⁻| wᵢ rᵢ)` given quadrature weights and radii.
    pub fn clip_nonnegative(&mut self, weights: &[f64], radii: &[f64]) -> (f64, f64) {
        let mut mass = 0.0;
        let mut pres = 0.0;
        for i in 0..self.len() {
            if self.rho[i] < 0.0 {
                mass -= self.rho[i] * weights[i] * radii[i];
                self.rho[i] = 0.0;
            }
            if self.p[i] < 0.0 {
                pres -= self.p[i] * weights[i] * radii[i];
                self.p[i] = 0.0;
            }
        }
        (mass, pres)
    }

    /// Check the state invariants: nonnegative `ρ`, `P`, center pins, and the
    /// wall pins for fixed-boundary geometries.
    pub fn check_invariants(&self, wall: bool) -> Result<()> {
        self.ensure_finite()?;
        if let Some(i) = self.rho.iter().position(|&x| x < 0.0) {
            return Err(Error::Invariant(format!("negative density at node {i}")));
        }
        if let Some(i) = self.p.iter().position(|&x| x < 0.0) {
            return Err(Error::Invariant(format!("negative pressure at node {i}")));
        }
        if self.u[0] != 0.0 || self.b[0] != 0.0 {
            return Err(Error::Invariant("center values u(0), B(0) must vanish".into()));
        }
        if let Some(v) = &self.v {
            if v[0] != 0.0 {
                return Err(Error::Invariant("center value v(0) must vanish".into()));
            }
        }
        if wall {
            let n = self.last();
            let wall_ok = self.u[n] == 0.0
                && self.v.as_ref().is_none_or(|v| v[n] == 0.0)
                && self.w.as_ref().is_none_or(|w| w[n] == 0.0);
            if !wall_ok {
                return Err(Error::Invariant("wall velocity must vanish".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_by_geometry() {
        let s = FluidState::zeros(9, Geometry::Disk2D);
        assert!(s.v.is_none() && s.w.is_none());
        let s = FluidState::zeros(9, Geometry::Cylinder3D);
        assert_eq!(s.v.as_ref().unwrap().len(), 9);
        assert!(s.check_invariants(true).is_ok());
    }

    #[test]
    fn invariant_failures() {
        let mut s = FluidState::zeros(9, Geometry::Disk2D);
        s.rho[3] = -1e-3;
        assert!(s.check_invariants(true).is_err());
        let w = vec![0.1; 9];
        let r: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let (m, _) = s.clip_nonnegative(&w, &r);
        assert!((m - 1e-3 * 0.1 * 3.0).abs() < 1e-15);
        assert!(s.check_invariants(true).is_ok());
        s.u[8] = 1.0;
        assert!(s.check_invariants(true).is_err());
        assert!(s.check_invariants(false).is_ok());
        s.b[2] = f64::NAN;
        assert_eq!(s.first_non_finite(), Some((2, "B")));
    }
}
