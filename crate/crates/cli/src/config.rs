//! Merging a JSON config file under the command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::{DEFAULT_TOL, TOL_ENV};

/// Top-level object of a config file; keys match the long flag names with
/// `_` for `-`. Keys a command does not know are ignored.
pub fn load(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?
    {
        Value::Object(map) => Ok(map),
        _ => bail!("config {} must hold a JSON object", path.display()),
    }
}

/// Overlays the flags that were given (non-null, and `true` for switches) on
/// the config values.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: &Map<String, Value>) -> Result<T> {
    let mut merged = config.clone();
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !(v.is_null() || v == Value::Bool(false)) {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).context("invalid option value in config")
}

/// Flag or config value, else the environment; `None` if neither is set.
pub fn explicit_tol(given: Option<f64>) -> Result<Option<f64>> {
    let tol = match given {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(s) => s
                .trim()
                .parse()
                .with_context(|| format!("{TOL_ENV}={s} is not a number"))?,
            Err(_) => return Ok(None),
        },
    };
    if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
        bail!("tolerance {tol} must lie in (0, 1)");
    }
    Ok(Some(tol))
}

pub fn resolve_tol(given: Option<f64>) -> Result<f64> {
    Ok(explicit_tol(given)?.unwrap_or(DEFAULT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::PmfArgs;

    #[test]
    fn flags_override_config() {
        let config: Map<String, Value> =
            serde_json::from_str(r#"{"family":"poisson","alpha":2.0,"cross_check":true}"#).unwrap();
        let flags = PmfArgs {
            alpha: Some(3.0),
            ..Default::default()
        };
        let merged = merge(&flags, &config).unwrap();
        assert_eq!(merged.alpha, Some(3.0));
        assert!(merged.cross_check);
        assert!(merged.family.is_some());
    }
}
