//! Line-oriented scenario configuration.
//!
//! ```text
//! # comment
//! geometry = "disk2d"
//! grid.n = 1024
//! physics.mu = 0.05
//! init.rho = "bump 0.5 0.9 1.0 on 0.5 0.7; constant 1.0 on 0.7 end"
//! ```
//!
//! Every key is optional and falls back to [`ScenarioConfig::default`].
//! Unknown keys are rejected.

use crate::error::{Error, Result};
use crate::params::{Geometry, PhysParams};
use crate::profile::Profile;
use crate::solver::{PicardSettings, Scheme, SolverSettings, VacuumStrategy};

#[derive(Debug, Clone, PartialEq)]
pub struct InitialProfiles {
    pub rho: Profile,
    pub u: Profile,
    pub p: Profile,
    pub b: Profile,
    pub v: Option<Profile>,
    pub w: Option<Profile>,
}

/// Optional replacements for the quantities entering the lifespan bounds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundOverrides {
    pub alpha: Option<f64>,
    pub c0: Option<f64>,
    pub e0: Option<f64>,
    pub r_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n: usize,
    /// Wall radius `R₀`, or the initial surface radius `a₀` for the free
    /// geometry.
    pub r_outer: f64,
    pub physics: PhysParams,
    pub init: InitialProfiles,
    /// Radius of the initial vacuum disk, if any.
    pub r0: Option<f64>,
    /// Use the manufactured solution (with its forcing) instead of `init.*`.
    pub manufactured: bool,
    pub t_end: f64,
    pub solver: SolverSettings,
    pub output_stride: usize,
    pub bounds: BoundOverrides,
    pub picard: PicardSettings,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n: 256,
            r_outer: 1.0,
            physics: PhysParams { mu: 1.0, lam: 0.0, gamma: 1.4, geometry: Geometry::Disk2D },
            init: InitialProfiles {
                rho: Profile::constant(1.0),
                u: Profile::zero(),
                p: Profile::constant(1.0),
                b: Profile::zero(),
                v: None,
                w: None,
            },
            r0: None,
            manufactured: false,
            t_end: 1.0,
            solver: SolverSettings::default(),
            output_stride: 10,
            bounds: BoundOverrides::default(),
            picard: PicardSettings::default(),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, ch) in line.char_indices() {
        match ch {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str) -> std::result::Result<&str, String> {
    let v = value.trim();
    if let Some(rest) = v.strip_prefix('"') {
        return rest.strip_suffix('"').ok_or_else(|| "unterminated string".to_string());
    }
    Ok(v)
}

fn real(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a number, got {v:?}"))
}

fn count(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got {v:?}"))
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {v:?}")),
    }
}

fn profile(v: &str) -> std::result::Result<Profile, String> {
    Profile::parse(v).map_err(|e| e.to_string())
}

impl ScenarioConfig {
    /// Set one key. `value` may be double-quoted.
    pub fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = unquote(value)?;
        match key.trim() {
            "geometry" | "physics.geometry" => {
                self.physics.geometry = Geometry::parse(v).map_err(|e| e.to_string())?
            }
            "grid.n" => self.n = count(v)?,
            "grid.r_outer" => self.r_outer = real(v)?,
            "physics.mu" => self.physics.mu = real(v)?,
            "physics.lambda" | "physics.lam" => self.physics.lam = real(v)?,
            "physics.gamma" => self.physics.gamma = real(v)?,
            "init.rho" => self.init.rho = profile(v)?,
            "init.u" => self.init.u = profile(v)?,
            "init.p" => self.init.p = profile(v)?,
            "init.b" => self.init.b = profile(v)?,
            "init.v" => self.init.v = Some(profile(v)?),
            "init.w" => self.init.w = Some(profile(v)?),
            "init.r0" => self.r0 = Some(real(v)?),
            "init.manufactured" => self.manufactured = boolean(v)?,
            "time.t_end" => self.t_end = real(v)?,
            "time.cfl" => self.solver.cfl = real(v)?,
            "solver.scheme" => self.solver.scheme = Scheme::parse(v).map_err(|e| e.to_string())?,
            "solver.vacuum" => {
                self.solver.vacuum_strategy = VacuumStrategy::parse(v).map_err(|e| e.to_string())?
            }
            "solver.eps_vac" => self.solver.eps_vac = real(v)?,
            "solver.blowup_gradu_max" => self.solver.blowup_gradu_max = real(v)?,
            "solver.dt_min" => self.solver.dt_min = real(v)?,
            "solver.dissipation" => self.solver.dissipation = real(v)?,
            "output.stride" => self.output_stride = count(v)?,
            "bounds.alpha" => self.bounds.alpha = Some(real(v)?),
            "bounds.c0" => self.bounds.c0 = Some(real(v)?),
            "bounds.e0" => self.bounds.e0 = Some(real(v)?),
            "bounds.r_ref" => self.bounds.r_ref = Some(real(v)?),
            "picard.window" => self.picard.window = real(v)?,
            "picard.tol" => self.picard.tol = real(v)?,
            "picard.k_max" => self.picard.k_max = count(v)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
        self.apply(k, v).map_err(Error::Config)?;
        self.validate()
    }

    /// Consistency checks that do not need the sampled initial data.
    pub fn validate(&self) -> Result<()> {
        self.physics.validate()?;
        self.solver.validate()?;
        if self.n == 0 {
            return Err(Error::Config("grid.n must be positive".into()));
        }
        if !(self.r_outer > 0.0) {
            return Err(Error::Config("grid.r_outer must be positive".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::Config("time.t_end must be positive".into()));
        }
        if self.output_stride == 0 {
            return Err(Error::Config("output.stride must be positive".into()));
        }
        let swirl = self.physics.geometry.has_swirl();
        if !swirl && (self.init.v.is_some() || self.init.w.is_some()) {
            return Err(Error::Config(format!(
                "profiles v and w do not exist for geometry {}",
                self.physics.geometry.name()
            )));
        }
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0 && r0 < self.r_outer) {
                return Err(Error::Config(format!("init.r0 = {r0} must lie inside (0, r_outer)")));
            }
        }
        if self.manufactured && self.physics.geometry != Geometry::Disk2D {
            return Err(Error::Config("the manufactured solution is defined for the fixed-wall disk".into()));
        }
        Ok(())
    }
}

/// Parse and validate a configuration text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Syntax { line: idx + 1, msg: "expected key = value".into() })?;
        if key.trim().is_empty() {
            return Err(Error::Syntax { line: idx + 1, msg: "empty key".into() });
        }
        cfg.apply(key, value).map_err(|msg| Error::Syntax { line: idx + 1, msg })?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_disk_config() {
        let cfg = parse_config("geometry = \"disk2d\"\ngrid.n = 64 # coarse\n").unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.physics.geometry, Geometry::Disk2D);
    }

    #[test]
    fn swirl_profile_on_disk_rejected() {
        let err = parse_config("geometry = \"disk2d\"\ninit.v = \"poly 0 1 0\"\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err:?}");
    }

    #[test]
    fn gamma_below_one_rejected() {
        assert!(parse_config("physics.gamma = 0.9\n").is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        match parse_config("grid.n = 32\nnot a pair\n") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_config("# header\nsolver.bogus = 1\n") {
            Err(Error::Syntax { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("unknown key"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_config("init.b = \"poly 0 1 0\n").is_err());
    }

    #[test]
    fn hash_inside_string_is_kept() {
        assert_eq!(strip_comment("a = \"x # y\" # z"), "a = \"x # y\" ");
    }

    #[test]
    fn overrides() {
        let mut cfg = parse_config("").unwrap();
        cfg.apply_override("grid.n=128").unwrap();
        assert_eq!(cfg.n, 128);
        assert!(cfg.apply_override("grid.n").is_err());
        assert!(cfg.apply_override("time.t_end=-1").is_err());
    }
}
