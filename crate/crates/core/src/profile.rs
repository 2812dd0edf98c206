//! Piecewise-analytic initial profiles.
//!
//! A profile is a `;`-separated list of pieces that are summed:
//!
//! ```text
//! zero
//! constant C
//! poly C0 C1 C2              # C0 + C1 r + C2 r²
//! bump R_LO R_HI AMPLITUDE   # C¹ cubic hat on [R_LO, R_HI]
//! ramp R_LO R_HI K [AMPLITUDE] # 0 below R_LO, AMPLITUDE above R_HI,
//!                              # contact of order K at both ends
//! ```
//!
//! Each piece may be restricted to a half-open range with `on A B`
//! (`B` may be `end` for an unbounded range). Example, a smooth step from 0 at
//! r = 0.5 to 1 at r = 0.7:
//!
//! ```text
//! bump 0.5 0.9 1.0 on 0.5 0.7; constant 1.0 on 0.7 end
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Zero,
    Constant(f64),
    Poly(f64, f64, f64),
    Bump { lo: f64, hi: f64, amplitude: f64 },
    /// Smooth monotone step from 0 to 1 whose first `order − 1`
    /// derivatives vanish at both ends.
    Ramp { lo: f64, hi: f64, order: u32, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub kind: ProfileKind,
    pub range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    pub pieces: Vec<Piece>,
}

/// Rising C¹ cubic `3s² − 2s³` on `s ∈ [0, 1]`.
fn smoothstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Polynomial step `sᵏ Σⱼ₌₀^{k−1} C(k−1+j, j)(1−s)ʲ` on `s ∈ [0, 1]`,
/// clamped outside. Behaves like `C(2k−1, k) sᵏ` near 0.
pub fn ramp(r: f64, lo: f64, hi: f64, order: u32) -> f64 {
    let s = ((r - lo) / (hi - lo)).clamp(0.0, 1.0);
    let k = order as i32;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..k {
        if j > 0 {
            binom *= (k - 1 + j) as f64 / j as f64;
        }
        sum += binom * (1.0 - s).powi(j);
    }
    s.powi(k) * sum
}

/// The C¹ piecewise cubic that vanishes with its derivative at `lo` and `hi`
/// and peaks at `amplitude` at the midpoint.
pub fn bump(r: f64, lo: f64, hi: f64, amplitude: f64) -> f64 {
    if r <= lo || r >= hi {
        return 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let half = mid - lo;
    if r <= mid {
        amplitude * smoothstep((r - lo) / half)
    } else {
        amplitude * smoothstep((hi - r) / half)
    }
}

impl ProfileKind {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ProfileKind::Zero => 0.0,
            ProfileKind::Constant(c) => c,
            ProfileKind::Poly(c0, c1, c2) => c0 + r * (c1 + r * c2),
            ProfileKind::Bump { lo, hi, amplitude } => bump(r, lo, hi, amplitude),
            ProfileKind::Ramp { lo, hi, order, amplitude } => amplitude * ramp(r, lo, hi, order),
        }
    }
}

impl Piece {
    pub fn eval(&self, r: f64) -> f64 {
        match self.range {
            Some((a, b)) if r < a || r >= b => 0.0,
            _ => self.kind.eval(r),
        }
    }
}

impl Profile {
    pub fn zero() -> Self {
        Self { pieces: vec![Piece { kind: ProfileKind::Zero, range: None }] }
    }

    pub fn constant(c: f64) -> Self {
        Self { pieces: vec![Piece { kind: ProfileKind::Constant(c), range: None }] }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.pieces.iter().map(|p| p.eval(r)).sum()
    }

    pub fn sample(&self, radii: &[f64]) -> Vec<f64> {
        radii.iter().map(|&r| self.eval(r)).collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.pieces.iter().all(|p| match p.kind {
            ProfileKind::Zero => true,
            ProfileKind::Constant(c) => c == 0.0,
            ProfileKind::Poly(a, b, c) => a == 0.0 && b == 0.0 && c == 0.0,
            ProfileKind::Bump { amplitude, .. } => amplitude == 0.0,
            ProfileKind::Ramp { amplitude, .. } => amplitude == 0.0,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pieces = Vec::new();
        for raw in text.split(';') {
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            pieces.push(parse_piece(raw)?);
        }
        if pieces.is_empty() {
            return Err(Error::Config("empty profile".into()));
        }
        Ok(Self { pieces })
    }
}

fn num(tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config(format!("bad number {tok:?} in profile")))
}

fn parse_piece(text: &str) -> Result<Piece> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let (body, range) = match toks.iter().position(|&t| t == "on") {
        Some(i) => {
            if toks.len() != i + 3 {
                return Err(Error::Config(format!("range needs `on A B`: {text:?}")));
            }
            let a = num(toks[i + 1])?;
            let b = if toks[i + 2] == "end" { f64::INFINITY } else { num(toks[i + 2])? };
            if !(b > a) {
                return Err(Error::Config(format!("empty range in {text:?}")));
            }
            (&toks[..i], Some((a, b)))
        }
        None => (&toks[..], None),
    };
    let args = |n: usize| -> Result<Vec<f64>> {
        if body.len() != n + 1 {
            return Err(Error::Config(format!("{} takes {n} arguments: {text:?}", body[0])));
        }
        body[1..].iter().map(|t| num(t)).collect()
    };
    let kind = match body.first().copied() {
        Some("zero") => {
            args(0)?;
            ProfileKind::Zero
        }
        Some("constant") => ProfileKind::Constant(args(1)?[0]),
        Some("poly") => {
            let a = args(3)?;
            ProfileKind::Poly(a[0], a[1], a[2])
        }
        Some("bump") => {
            let a = args(3)?;
            if !(a[1] > a[0]) {
                return Err(Error::Config(format!("bump needs r_lo < r_hi: {text:?}")));
            }
            ProfileKind::Bump { lo: a[0], hi: a[1], amplitude: a[2] }
        }
        Some("ramp") => {
            let a = if body.len() == 4 {
                let mut a = args(3)?;
                a.push(1.0);
                a
            } else {
                args(4)?
            };
            if !(a[1] > a[0]) {
                return Err(Error::Config(format!("ramp needs r_lo < r_hi: {text:?}")));
            }
            if !(a[2] >= 1.0 && a[2] <= 16.0 && a[2].fract() == 0.0) {
                return Err(Error::Config(format!("ramp order must be an integer in 1..=16: {text:?}")));
            }
            ProfileKind::Ramp { lo: a[0], hi: a[1], order: a[2] as u32, amplitude: a[3] }
        }
        _ => return Err(Error::Config(format!("unknown profile kind in {text:?}"))),
    };
    Ok(Piece { kind, range })
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            match p.kind {
                ProfileKind::Zero => write!(f, "zero")?,
                ProfileKind::Constant(c) => write!(f, "constant {c}")?,
                ProfileKind::Poly(a, b, c) => write!(f, "poly {a} {b} {c}")?,
                ProfileKind::Bump { lo, hi, amplitude } => write!(f, "bump {lo} {hi} {amplitude}")?,
                ProfileKind::Ramp { lo, hi, order, amplitude } => write!(f, "ramp {lo} {hi} {order} {amplitude}")?,
            }
            if let Some((a, b)) = p.range {
                if b.is_infinite() {
                    write!(f, " on {a} end")?;
                } else {
                    write!(f, " on {a} {b}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.2, 0.2, 0.6, 3.0), 0.0);
        assert_eq!(bump(0.6, 0.2, 0.6, 3.0), 0.0);
        assert!((bump(0.4, 0.2, 0.6, 3.0) - 3.0).abs() < 1e-15);
        // symmetric about the midpoint
        assert!((bump(0.3, 0.2, 0.6, 3.0) - bump(0.5, 0.2, 0.6, 3.0)).abs() < 1e-15);
        // derivative vanishes at the ends
        let h = 1e-6;
        assert!(bump(0.2 + h, 0.2, 0.6, 3.0) / h < 1e-3);
        assert!(bump(0.6 - h, 0.2, 0.6, 3.0) / h < 1e-3);
    }

    #[test]
    fn parse_and_eval() {
        let p = Profile::parse("bump 0.5 0.9 1.0 on 0.5 0.7; constant 1.0 on 0.7 end").unwrap();
        assert_eq!(p.eval(0.3), 0.0);
        assert!((p.eval(0.7) - 1.0).abs() < 1e-15);
        assert!((p.eval(0.69999999) - 1.0).abs() < 1e-12);
        assert_eq!(p.eval(0.95), 1.0);
        let q = Profile::parse("poly 0 1 -1").unwrap();
        assert!((q.eval(0.25) - 0.1875).abs() < 1e-15);
        let round = Profile::parse(&p.to_string()).unwrap();
        assert_eq!(round, p);
    }

    #[test]
    fn ramp_shape() {
        assert_eq!(ramp(0.2, 0.5, 0.7, 4), 0.0);
        assert_eq!(ramp(0.9, 0.5, 0.7, 4), 1.0);
        assert!((ramp(0.6, 0.5, 0.7, 4) - 0.5).abs() < 1e-14);
        assert!((ramp(0.6, 0.5, 0.7, 2) - bump(0.6, 0.5, 0.9, 1.0)).abs() < 1e-14);
        let near = ramp(0.5 + 1e-3, 0.5, 0.7, 4);
        assert!((near / (35.0 * 0.005f64.powi(4)) - 1.0).abs() < 0.05, "{near}");
        let p = Profile::parse("ramp 0.5 0.7 4").unwrap();
        assert_eq!(p.to_string(), "ramp 0.5 0.7 4 1");
        let down = Profile::parse("ramp 0.5 0.7 4; ramp 0.8 1.0 4 -1").unwrap();
        assert_eq!(down.eval(0.75), 1.0);
        assert_eq!(down.eval(1.0), 0.0);
        assert!(Profile::parse("ramp 0.5 0.7 2.5").is_err());
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "wiggle 1", "constant", "poly 1 2", "bump 0.6 0.2 1", "constant 1 on 0.5", "constant x"] {
            assert!(Profile::parse(bad).is_err(), "{bad}");
        }
    }
}
