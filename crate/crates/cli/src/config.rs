//! Run settings: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use fcev::model::{CevSpec, DriverSpec, MarketSpec};

/// A failure and the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Validation(String),
    /// A computation failed: exit status 3.
    Numerical(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Keys accepted in config files; each has a `--key` flag of the same name.
pub const KEYS: [&str; 16] = [
    "model", "s0", "strike", "rate", "sigma", "alpha", "hurst", "beta", "gamma", "maturity", "out", "param", "from",
    "to", "steps", "overlay",
];

/// Settings keyed by name. `overlay` may repeat; every other key keeps its last value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
    pub overlays: Vec<String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected `key = value`", n + 1)))?;
            out.set(key.trim(), value.trim())
                .map_err(|e| invalid(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        if !KEYS.contains(&key) {
            return Err(format!("unknown key `{key}`"));
        }
        if key == "overlay" {
            self.overlays.push(value.to_string());
        } else {
            self.values.insert(key.to_string(), value.to_string());
        }
        Ok(())
    }

    /// `other` wins on every key it sets; its overlays replace ours if it has any.
    pub fn merged(mut self, other: Settings) -> Self {
        self.values.extend(other.values);
        if !other.overlays.is_empty() {
            self.overlays = other.overlays;
        }
        self
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.text(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| invalid(format!("{key}: `{v}` is not a finite number"))),
        }
    }

    pub fn required(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?.ok_or_else(|| invalid(format!("{key} is required")))
    }

    /// Copy with the comma-separated `key=value` pairs of an overlay applied.
    pub fn with_overlay(&self, overlay: &str) -> Result<Settings, CliError> {
        let mut out = Settings {
            values: self.values.clone(),
            overlays: Vec::new(),
        };
        for pair in overlay.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| invalid(format!("overlay `{overlay}`: expected key=value pairs")))?;
            let k = k.trim();
            if k == "overlay" || k == "out" {
                return Err(invalid(format!("overlay `{overlay}`: `{k}` cannot be overlaid")));
            }
            out.set(k, v.trim())
                .map_err(|e| invalid(format!("overlay `{overlay}`: {e}")))?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Cev,
    Fcev,
    Mfcev,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Cev => "cev",
            Model::Fcev => "fcev",
            Model::Mfcev => "mfcev",
        }
    }
}

/// A validated contract.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub market: MarketSpec,
    pub cev: CevSpec,
    pub driver: DriverSpec,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let model = match s.text("model") {
            Some("cev") => Model::Cev,
            Some("fcev") => Model::Fcev,
            Some("mfcev") => Model::Mfcev,
            Some(other) => return Err(invalid(format!("model: `{other}` is not one of cev, fcev, mfcev"))),
            None => return Err(invalid("model is required")),
        };
        let market = MarketSpec {
            spot: s.required("s0")?,
            strike: s.required("strike")?,
            rate: s.required("rate")?,
            maturity: s.required("maturity")?,
        };
        let cev = CevSpec {
            sigma: s.required("sigma")?,
            alpha: s.required("alpha")?,
        };
        let driver = match model {
            Model::Cev => DriverSpec::Classical,
            Model::Fcev => DriverSpec::Fractional {
                hurst: s
                    .number("hurst")?
                    .ok_or_else(|| invalid("hurst is required for model fcev"))?,
            },
            Model::Mfcev => DriverSpec::Mixed {
                beta: s
                    .number("beta")?
                    .ok_or_else(|| invalid("beta is required for model mfcev"))?,
                gamma: s
                    .number("gamma")?
                    .ok_or_else(|| invalid("gamma is required for model mfcev"))?,
                hurst: s
                    .number("hurst")?
                    .ok_or_else(|| invalid("hurst is required for model mfcev"))?,
            },
        };
        // the library's messages name the offending field
        market.validate().map_err(|e| invalid(e.to_string()))?;
        cev.validate().map_err(|e| invalid(e.to_string()))?;
        driver.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(Self {
            model,
            market,
            cev,
            driver,
        })
    }

    pub fn hurst(&self) -> Option<f64> {
        match self.driver {
            DriverSpec::Classical => None,
            DriverSpec::Fractional { hurst } | DriverSpec::Mixed { hurst, .. } => Some(hurst),
        }
    }

    pub fn mix(&self) -> (Option<f64>, Option<f64>) {
        match self.driver {
            DriverSpec::Mixed { beta, gamma, .. } => (Some(beta), Some(gamma)),
            _ => (None, None),
        }
    }
}
