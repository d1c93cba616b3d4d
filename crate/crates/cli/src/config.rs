//! Effective settings: command-line flags over a JSON config file over
//! built-in defaults.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every tunable of every subcommand. Unset fields fall through to the next
/// source; the resolved set is echoed into the JSON sidecar.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "analytic-only")]
    pub analytic_only: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "epsilon-circle")]
    pub epsilon_circle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "condition-threshold")]
    pub condition_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "n-list")]
    pub n_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "psi-min")]
    pub psi_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "psi-max")]
    pub psi_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "psi-step")]
    pub psi_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "n-max")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "grid-size")]
    pub grid_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", alias = "debug-fixed-field")]
    pub debug_fixed_field: Option<bool>,
}

macro_rules! overlay_fields {
    ($low:expr, $high:expr, $($f:ident),*) => {
        Settings { $($f: $high.$f.or($low.$f)),* }
    };
}

impl Settings {
    /// Fields set in `high` win over fields set in `self`.
    pub fn overlay(self, high: Settings) -> Settings {
        overlay_fields!(
            self, high, n, samples, seed, workers, analytic_only, epsilon_circle,
            condition_threshold, k, sep, points, alpha, n_list, psi_min, psi_max, psi_step,
            n_max, grid_size, debug_fixed_field
        )
    }

    /// Reads a config file: either a flat settings object, or a sidecar
    /// record whose `config` member holds one.
    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {} is not JSON: {e}", path.display())))?;
        let inner = match value.get("config") {
            Some(c) if value.get("command").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(inner)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Settings {
            n: Some(3),
            seed: Some(9),
            ..Default::default()
        };
        let flags = Settings {
            n: Some(5),
            ..Default::default()
        };
        let s = file.overlay(flags);
        assert_eq!(s.n, Some(5));
        assert_eq!(s.seed, Some(9));
        assert_eq!(s.samples, None);
    }

    #[test]
    fn round_trips_through_json() {
        let s = Settings {
            n: Some(4),
            sep: Some(vec![0.5, 1.0]),
            alpha: Some(1.0 / 6.0),
            ..Default::default()
        };
        let text = serde_json::to_string(&s).unwrap();
        let back: Settings = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"nn": 3}"#).is_err());
    }
}
