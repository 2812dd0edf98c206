//! Uniform radial grids and the trapezoid quadrature used by every integral
//! in the crate.
//!
//! All L² norms drop the constant angular factor (2π for the disk, 2π·1 for
//! the unit-period cylinder): `‖f‖² = ∫₀^R f² r dr`.

use crate::error::{Error, Result};

/// Node-based discretization of `[0, r_outer]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    r_outer: f64,
    spacing: Vec<f64>,
    quad_weights: Vec<f64>,
}

/// Radial weight applied inside [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `∫ f dr`
    Plain,
    /// `∫ f r dr`
    RadialR,
}

impl RadialGrid {
    /// Uniform grid with `n` cells on `[0, r_outer]`.
    pub fn uniform(n: usize, r_outer: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("grid needs at least one cell".into()));
        }
        if !(r_outer > 0.0) || !r_outer.is_finite() {
            return Err(Error::Config(format!("grid radius must be positive, got {r_outer}")));
        }
        let h = r_outer / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        nodes[n] = r_outer;
        let spacing: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let mut quad_weights = vec![0.0; n + 1];
        for (c, dx) in spacing.iter().enumerate() {
            quad_weights[c] += 0.5 * dx;
            quad_weights[c + 1] += 0.5 * dx;
        }
        Ok(Self { nodes, r_outer, spacing, quad_weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Number of cells `N`; there are `N + 1` nodes.
    pub fn cells(&self) -> usize {
        self.spacing.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Uniform cell width.
    pub fn dr(&self) -> f64 {
        self.r_outer / self.cells() as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Index of the cell containing `r` (clamped to the grid), i.e. the
    /// largest `k` with `nodes[k] <= r`, capped at `N - 1`.
    pub fn cell_of(&self, r: f64) -> usize {
        let k = (r / self.dr()).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.cells() - 1)
        }
    }

    /// Piecewise-linear interpolation of nodal samples; linear extrapolation
    /// from the end cells outside `[0, r_outer]`.
    pub fn interpolate(&self, samples: &[f64], r: f64) -> f64 {
        let k = self.cell_of(r);
        let s = (r - self.nodes[k]) / self.spacing[k];
        samples[k] * (1.0 - s) + samples[k + 1] * s
    }

    /// Trapezoid integral over `[0, r_end]` of an integrand given at nodes by
    /// `at_node` and at `r_end` itself by `at_end`. The partial final cell is
    /// integrated with the trapezoid rule on `[nodes[k], r_end]`.
    pub fn trapezoid_upto(&self, r_end: f64, at_node: impl Fn(usize) -> f64, at_end: f64) -> f64 {
        if r_end <= 0.0 {
            return 0.0;
        }
        let r_end = r_end.min(self.r_outer);
        let k = self.cell_of(r_end);
        let mut sum = 0.0;
        for c in 0..k {
            sum += 0.5 * self.spacing[c] * (at_node(c) + at_node(c + 1));
        }
        let tail = r_end - self.nodes[k];
        if tail > 0.0 {
            sum += 0.5 * tail * (at_node(k) + at_end);
        }
        sum
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, six points.
const GAUSS6: [(f64, f64); 6] = [
    (0.033765242898423975, 0.08566224618958517),
    (0.16939530676686776, 0.180_380_786_524_069_3),
    (0.38069040695840156, 0.23395696728634552),
    (0.619_309_593_041_598_5, 0.23395696728634552),
    (0.830_604_693_233_132_2, 0.180_380_786_524_069_3),
    (0.966_234_757_101_576, 0.08566224618958517),
];

/// `∫_a^b r^β q(r) dr` with `q` linear from `qa` to `qb`. Closed form near
/// the origin, where the weight is not smooth; Gauss–Legendre elsewhere,
/// where the closed form would cancel.
fn power_weighted_cell(a: f64, b: f64, qa: f64, qb: f64, beta: f64) -> f64 {
    let h = b - a;
    if a <= 16.0 * h {
        let m0 = (b.powf(beta + 1.0) - a.powf(beta + 1.0)) / (beta + 1.0);
        let m1 = (b.powf(beta + 2.0) - a.powf(beta + 2.0)) / (beta + 2.0);
        (qa * (b * m0 - m1) + qb * (m1 - a * m0)) / h
    } else {
        GAUSS6
            .iter()
            .map(|&(s, w)| w * (a + h * s).powf(beta) * (qa + (qb - qa) * s))
            .sum::<f64>()
            * h
    }
}

impl RadialGrid {
    /// `∫₀^{r_end} r^β q(r) dr` for the piecewise-linear interpolant of the
    /// nodal samples `q`, with the weight integrated exactly (`β > −1`).
    pub fn power_weighted_upto(&self, r_end: f64, q: &[f64], beta: f64) -> f64 {
        if r_end <= 0.0 {
            return 0.0;
        }
        let r_end = r_end.min(self.r_outer);
        let k = self.cell_of(r_end);
        let mut sum = 0.0;
        for c in 0..k {
            sum += power_weighted_cell(self.nodes[c], self.nodes[c + 1], q[c], q[c + 1], beta);
        }
        if r_end > self.nodes[k] {
            sum += power_weighted_cell(self.nodes[k], r_end, q[k], self.interpolate(q, r_end), beta);
        }
        sum
    }
}

/// Uniform grid constructor (`make_grid`).
pub fn make_grid(n: usize, r_outer: f64) -> Result<RadialGrid> {
    RadialGrid::uniform(n, r_outer)
}

/// Composite trapezoid quadrature of nodal samples over the whole grid.
pub fn integrate(samples: &[f64], grid: &RadialGrid, weight: Weight) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    let w = grid.quad_weights();
    let sum = match weight {
        Weight::Plain => samples.iter().zip(w).map(|(f, w)| f * w).sum(),
        Weight::RadialR => samples
            .iter()
            .zip(w)
            .zip(grid.nodes())
            .map(|((f, w), r)| f * w * r)
            .sum(),
    };
    Ok(sum)
}

/// `(∫₀^R f² r dr)^{1/2}`.
pub fn l2_norm(samples: &[f64], grid: &RadialGrid) -> f64 {
    samples
        .iter()
        .zip(grid.quad_weights())
        .zip(grid.nodes())
        .map(|((f, w), r)| f * f * w * r)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_spacing() {
        let g = make_grid(4, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = make_grid(8, 2.0).unwrap();
        assert!(g.spacing().iter().all(|&d| d == 0.25));
    }

    #[test]
    fn power_weight_exact_on_linear_data() {
        let g = make_grid(1000, 1.0).unwrap();
        let q: Vec<f64> = g.nodes().iter().map(|r| 2.0 - r).collect();
        for (r_end, beta) in [(1.0f64, 0.5f64), (0.7317, 0.5), (0.7317, 1.9), (0.3, -0.4)] {
            let exact = 2.0 * r_end.powf(beta + 1.0) / (beta + 1.0) - r_end.powf(beta + 2.0) / (beta + 2.0);
            let got = g.power_weighted_upto(r_end, &q, beta);
            assert!((got - exact).abs() < 1e-13, "{r_end} {beta}: {got} vs {exact}");
        }
        assert_eq!(g.power_weighted_upto(0.0, &q, 0.5), 0.0);
    }

    #[test]
    fn trapezoid_weights() {
        let g = make_grid(4, 1.0).unwrap();
        assert_eq!(g.quad_weights(), &[0.125, 0.25, 0.25, 0.25, 0.125]);
    }

    #[test]
    fn bad_grid_rejected() {
        assert!(make_grid(0, 1.0).is_err());
        assert!(make_grid(8, 0.0).is_err());
        assert!(make_grid(8, -1.0).is_err());
    }

    #[test]
    fn integrate_examples() {
        let g = make_grid(64, 1.0).unwrap();
        let ones = vec![1.0; g.len()];
        assert!((integrate(&ones, &g, Weight::Plain).unwrap() - 1.0).abs() < 1e-14);
        let lin: Vec<f64> = g.nodes().to_vec();
        assert!((integrate(&lin, &g, Weight::Plain).unwrap() - 0.5).abs() < 1e-14);
        let twos = vec![2.0; g.len()];
        assert!((integrate(&twos, &g, Weight::RadialR).unwrap() - 1.0).abs() < 1e-13);
        assert!(matches!(
            integrate(&ones[1..], &g, Weight::Plain),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn radial_weight_converges_second_order() {
        // ∫₀¹ sin(r) r dr = sin 1 - cos 1
        let exact = 1f64.sin() - 1f64.cos();
        let err = |n| {
            let g = make_grid(n, 1.0).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|r| r.sin()).collect();
            (integrate(&f, &g, Weight::RadialR).unwrap() - exact).abs()
        };
        let ratio = err(128) / err(256);
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn partial_cell_integration() {
        let g = make_grid(10, 1.0).unwrap();
        let f: Vec<f64> = g.nodes().to_vec();
        let r_end = 0.537;
        let v = g.trapezoid_upto(r_end, |i| f[i], g.interpolate(&f, r_end));
        assert!((v - 0.5 * r_end * r_end).abs() < 1e-14);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linear_polynomials_exact(n in 1usize..200, r_outer in 0.1f64..10.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
                let g = make_grid(n, r_outer).unwrap();
                let f: Vec<f64> = g.nodes().iter().map(|r| a + b * r).collect();
                let exact = a * r_outer + 0.5 * b * r_outer * r_outer;
                let got = integrate(&f, &g, Weight::Plain).unwrap();
                let scale = (a.abs() * r_outer + 0.5 * b.abs() * r_outer * r_outer).max(1e-300);
                prop_assert!((got - exact).abs() <= 1e-13 * scale);
            }
        }
    }
}
