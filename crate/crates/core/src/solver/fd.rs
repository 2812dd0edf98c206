//! Second-order finite differences on a uniform node grid starting at r = 0.
//!
//! The center uses the parity of the field under `r → −r` as a mirror ghost:
//! `ρ, P, w` and `uB` are even, `u, v, B` and `ρu` are odd. The outer end uses
//! one-sided second-order stencils.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Parity {
    Even,
    Odd,
}

impl Parity {
    #[inline]
    fn ghost(self, q: f64, q0: f64) -> f64 {
        match self {
            Parity::Even => q,
            // odd about r=0 with q(0) pinned: q(-r) = 2q(0) - q(r)
            Parity::Odd => 2.0 * q0 - q,
        }
    }
}

/// `∂_r q` at every node.
pub(crate) fn ddr(q: &[f64], h: f64, parity: Parity, out: &mut [f64]) {
    let n = q.len() - 1;
    let inv2h = 0.5 / h;
    out[0] = (q[1] - parity.ghost(q[1], q[0])) * inv2h;
    for i in 1..n {
        out[i] = (q[i + 1] - q[i - 1]) * inv2h;
    }
    out[n] = (3.0 * q[n] - 4.0 * q[n - 1] + q[n - 2]) * inv2h;
}

/// `∂_r q` at node `i` alone.
#[inline]
pub(crate) fn ddr_at(q: &[f64], h: f64, parity: Parity, i: usize) -> f64 {
    let n = q.len() - 1;
    if i == 0 {
        (q[1] - parity.ghost(q[1], q[0])) * 0.5 / h
    } else if i == n {
        (3.0 * q[n] - 4.0 * q[n - 1] + q[n - 2]) * 0.5 / h
    } else {
        (q[i + 1] - q[i - 1]) * 0.5 / h
    }
}

/// `u_r + u/r` for an odd field with `u(0) = 0`; equals `2u_r(0)` at the center.
pub(crate) fn divergence(u: &[f64], r: &[f64], h: f64, out: &mut [f64]) {
    ddr(u, h, Parity::Odd, out);
    out[0] *= 2.0;
    for i in 1..u.len() {
        out[i] += u[i] / r[i];
    }
}

/// `(u_r + u/r)_r = u_rr + u_r/r − u/r²` (the radial vector Laplacian), zero
/// at the center by oddness.
pub(crate) fn vector_laplacian(u: &[f64], r: &[f64], h: f64, out: &mut [f64]) {
    let n = u.len() - 1;
    let ih2 = 1.0 / (h * h);
    let inv2h = 0.5 / h;
    out[0] = 0.0;
    for i in 1..n {
        let ri = r[i];
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2 + (u[i + 1] - u[i - 1]) * inv2h / ri
            - u[i] / (ri * ri);
    }
    let urr = (2.0 * u[n] - 5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) * ih2;
    let ur = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) * inv2h;
    out[n] = urr + ur / r[n] - u[n] / (r[n] * r[n]);
}

/// `(r w_r)_r / r = w_rr + w_r/r` for an even field; `2 w_rr(0)` at the center.
pub(crate) fn scalar_laplacian(w: &[f64], r: &[f64], h: f64, out: &mut [f64]) {
    let n = w.len() - 1;
    let ih2 = 1.0 / (h * h);
    let inv2h = 0.5 / h;
    out[0] = 4.0 * (w[1] - w[0]) * ih2;
    for i in 1..n {
        out[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * ih2 + (w[i + 1] - w[i - 1]) * inv2h / r[i];
    }
    let wrr = (2.0 * w[n] - 5.0 * w[n - 1] + 4.0 * w[n - 2] - w[n - 3]) * ih2;
    let wr = (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) * inv2h;
    out[n] = wrr + wr / r[n];
}

/// Fourth undivided difference `Δ⁴q`, with mirror ghosts at the center and
/// zero on the last two nodes.
pub(crate) fn fourth_difference(q: &[f64], parity: Parity, out: &mut [f64]) {
    let n = q.len() - 1;
    let at = |k: isize| -> f64 {
        if k >= 0 {
            q[k as usize]
        } else {
            parity.ghost(q[(-k) as usize], q[0])
        }
    };
    for i in 0..n.saturating_sub(1) {
        let k = i as isize;
        out[i] = at(k + 2) - 4.0 * at(k + 1) + 6.0 * at(k) - 4.0 * at(k - 1) + at(k - 2);
    }
    for o in out.iter_mut().skip(n.saturating_sub(1)) {
        *o = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> (Vec<f64>, f64) {
        let h = 1.0 / n as f64;
        ((0..=n).map(|i| i as f64 * h).collect(), h)
    }

    #[test]
    fn exact_on_quadratics() {
        let (r, h) = grid(16);
        let q: Vec<f64> = r.iter().map(|x| 1.0 + 2.0 * x * x).collect();
        let mut d = vec![0.0; r.len()];
        ddr(&q, h, Parity::Even, &mut d);
        for (x, dq) in r.iter().zip(&d) {
            assert!((dq - 4.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_center_stencils() {
        let (r, h) = grid(32);
        let u: Vec<f64> = r.iter().map(|x| 3.0 * x).collect();
        let mut div = vec![0.0; r.len()];
        divergence(&u, &r, h, &mut div);
        assert!(div.iter().all(|v| (v - 6.0).abs() < 1e-12));
        let mut lap = vec![0.0; r.len()];
        vector_laplacian(&u, &r, h, &mut lap);
        assert!(lap.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn scalar_laplacian_of_r_squared() {
        let (r, h) = grid(20);
        let w: Vec<f64> = r.iter().map(|x| x * x).collect();
        let mut out = vec![0.0; r.len()];
        scalar_laplacian(&w, &r, h, &mut out);
        assert!(out.iter().all(|v| (v - 4.0).abs() < 1e-9), "{out:?}");
    }

    #[test]
    fn fourth_difference_kills_cubics() {
        let (r, _) = grid(20);
        let q: Vec<f64> = r.iter().map(|x| 1.0 + x * x).collect();
        let mut out = vec![0.0; r.len()];
        fourth_difference(&q, Parity::Even, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }
}
