use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::Geometry;

/// Inputs of the closed-form lifespan and divergence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub mu: f64,
    pub lam: f64,
    /// `R₀` for walls; the envelope constant `a₀ + sqrt(E₀/(2μ+λ))` for the
    /// free surface.
    pub r_ref: f64,
    pub c0: f64,
    pub e0: f64,
    pub alpha: f64,
    pub geometry: Geometry,
}

/// Smallest admissible exponent: `7/6` with swirl, otherwise just above 1.
pub fn alpha_min(geometry: Geometry) -> f64 {
    if geometry.has_swirl() {
        7.0 / 6.0
    } else {
        1.0
    }
}

fn check_alpha(alpha: f64, geometry: Geometry) -> Result<()> {
    let lo = alpha_min(geometry);
    let ok = if geometry.has_swirl() { alpha >= lo } else { alpha > lo };
    if ok && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} outside the admissible range for {}", geometry.name())))
    }
}

impl BoundInputs {
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lam
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha, self.geometry)?;
        if !(self.nu() > 0.0) {
            return Err(Error::Domain("2μ+λ must be positive".into()));
        }
        if !(self.r_ref > 0.0) {
            return Err(Error::Domain("reference radius must be positive".into()));
        }
        if !(self.e0 >= 0.0) {
            return Err(Error::Domain("initial energy must be nonnegative".into()));
        }
        Ok(())
    }
}

/// `g(α) = α/√(2α−2) + (α+1)/√(2α)` on `1 < α < 2`.
pub fn moment_coefficient(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (1, 2)")));
    }
    Ok(alpha / (2.0 * alpha - 2.0).sqrt() + (alpha + 1.0) / (2.0 * alpha).sqrt())
}

/// `C₀²(2−α)² / (2(2μ+λ) R g(α))`.
pub fn div_lower_bound(b: &BoundInputs, r_now: f64) -> Result<f64> {
    b.validate()?;
    if !(r_now > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r_now}")));
    }
    let g = moment_coefficient(b.alpha)?;
    let s = 2.0 - b.alpha;
    Ok(b.c0 * b.c0 * s * s / (2.0 * b.nu() * r_now * g))
}

/// Upper bound on the lifespan of the strong solution. `+∞` when `C₀ = 0`.
pub fn lifespan_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let g = moment_coefficient(b.alpha)?;
    let s = 2.0 - b.alpha;
    let flux = s * s * b.c0 * b.c0;
    let sq_nu = b.nu().sqrt();
    // the cylinder's extra √2 in the bracket is applied as an exact factor 2
    let inner = flux / (sq_nu * b.r_ref * 2.0 * g);
    if inner == 0.0 {
        return Ok(f64::INFINITY);
    }
    let k = b.e0 / (inner * inner);
    Ok(match b.geometry {
        Geometry::Disk2D => k,
        Geometry::Cylinder3D => 2.0 * k,
        Geometry::Disk2DFree => k.exp_m1(),
    })
}

pub const ALPHA_STEP: f64 = 1e-4;

/// Minimize [`lifespan_bound`] over the admissible `α` on a uniform grid of
/// step [`ALPHA_STEP`]. Returns `(α*, T*)`.
pub fn optimize_alpha(template: &BoundInputs) -> Result<(f64, f64)> {
    let lo = alpha_min(template.geometry);
    let inclusive = template.geometry.has_swirl();
    let mut best = (f64::NAN, f64::INFINITY);
    let mut k: u32 = if inclusive { 0 } else { 1 };
    loop {
        let alpha = lo + k as f64 * ALPHA_STEP;
        if alpha >= 2.0 {
            break;
        }
        let t = lifespan_bound(&template.with_alpha(alpha))?;
        if t < best.1 {
            best = (alpha, t);
        }
        k += 1;
    }
    if best.0.is_nan() {
        // every candidate gave an infinite bound (no flux)
        let alpha = 1.5f64.max(lo);
        return Ok((alpha, lifespan_bound(&template.with_alpha(alpha))?));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> BoundInputs {
        BoundInputs { mu: 1.0, lam: 0.0, r_ref: 1.0, c0: 1.0, e0: 1.0, alpha: 1.5, geometry: Geometry::Disk2D }
    }

    #[test]
    fn coefficient_values() {
        assert!((moment_coefficient(1.5).unwrap() - 2.94337567297406).abs() < 1e-12);
        assert!((moment_coefficient(2.0 - 1e-9).unwrap() - 2.914213562248).abs() < 1e-8);
        assert!(moment_coefficient(1.0 + 1e-12).unwrap() > 1e5);
        assert!(moment_coefficient(1.0).is_err());
        assert!(moment_coefficient(2.0).is_err());
    }

    #[test]
    fn lifespan_examples() {
        let t = lifespan_bound(&disk()).unwrap();
        assert!((t / 1_108.922_925_088_707_4 - 1.0).abs() < 1e-12, "{t}");
        let cyl = BoundInputs { geometry: Geometry::Cylinder3D, ..disk() };
        assert_eq!(lifespan_bound(&cyl).unwrap() / t, 2.0);
        let none = BoundInputs { c0: 0.0, ..disk() };
        assert_eq!(lifespan_bound(&none).unwrap(), f64::INFINITY);
        assert!(lifespan_bound(&BoundInputs { alpha: 2.0, ..disk() }).is_err());
        assert!(lifespan_bound(&BoundInputs { alpha: 1.1, ..cyl }).is_err());
    }

    #[test]
    fn free_surface_bound_is_exponential() {
        let b = BoundInputs { geometry: Geometry::Disk2DFree, r_ref: 2.0, c0: 3.0, ..disk() };
        let g = moment_coefficient(1.5).unwrap();
        let inner = 0.25 * 9.0 / (2.0 * 2f64.sqrt() * 2.0 * g);
        let expected = (1.0 / (inner * inner)).exp() - 1.0;
        assert!((lifespan_bound(&b).unwrap() / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_bound_examples() {
        assert!((div_lower_bound(&disk(), 1.0).unwrap() - 0.0212341226347258).abs() < 1e-14);
        let half = div_lower_bound(&disk(), 2.0).unwrap();
        assert!((half * 2.0 - 0.0212341226347258).abs() < 1e-14);
        assert_eq!(div_lower_bound(&BoundInputs { c0: 0.0, ..disk() }, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn optimizer_matches_fine_search() {
        let (a, t) = optimize_alpha(&disk()).unwrap();
        assert!((a - 1.110782).abs() < 1e-3, "{a}");
        assert!((t - 182.439).abs() / 182.439 < 1e-4, "{t}");
        let (a10, t10) = optimize_alpha(&BoundInputs { e0: 10.0, ..disk() }).unwrap();
        assert_eq!(a10, a);
        assert!((t10 / t - 10.0).abs() < 1e-12);
        let (ac, _) = optimize_alpha(&BoundInputs { geometry: Geometry::Cylinder3D, ..disk() }).unwrap();
        assert!(ac >= 7.0 / 6.0 && ac - 7.0 / 6.0 < 1e-12);
    }
}
