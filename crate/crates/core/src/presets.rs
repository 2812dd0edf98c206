//! Checked-in scenario presets.

use crate::config::{parse_config, ScenarioConfig};
use crate::error::{Error, Result};

pub const PRESETS: [(&str, &str); 5] = [
    ("smooth-novac", include_str!("../presets/smooth-novac.cfg")),
    ("disk-blowup", include_str!("../presets/disk-blowup.cfg")),
    ("cylinder-blowup", include_str!("../presets/cylinder-blowup.cfg")),
    ("free-blowup", include_str!("../presets/free-blowup.cfg")),
    ("mms", include_str!("../presets/mms.cfg")),
];

/// Configuration text of a preset.
pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Config(format!("unknown preset {name:?}; known: {}", known.join(", ")))
        })
}

/// Parsed preset configuration.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    parse_config(preset_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::init_scenario;

    #[test]
    fn every_preset_initializes() {
        for (name, _) in PRESETS {
            let mut cfg = preset(name).unwrap();
            cfg.n = 128;
            init_scenario(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(preset("nope").is_err());
    }
}
