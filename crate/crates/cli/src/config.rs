//! Flat dotted-key configuration: file, `--set` overrides, then flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use idregret::{Grid1D, LevyTriplet, PriorSpec};

/// Largest grid accepted from a configuration.
pub const MAX_GRID_N: usize = 65536;

/// Configuration problem; maps to exit status 3.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<idregret::Error> for ConfigError {
    fn from(e: idregret::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

/// Keys understood by at least one command.
pub const KNOWN_KEYS: [&str; 24] = [
    "model.kind",
    "model.v",
    "model.c",
    "model.alpha",
    "model.rate",
    "model.shape",
    "model.scale",
    "model.intensity",
    "model.d",
    "prior.kind",
    "prior.sigma2",
    "prior.beta",
    "prior.r0",
    "prior.location",
    "grid.lower",
    "grid.upper",
    "grid.n",
    "schedule.h",
    "schedule.n",
    "schedule.r",
    "output.path",
    "output.format",
    "ascent.seed",
    "ascent.family",
];

/// Resolved key–value configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_text(text: &str) -> ConfigResult<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", lineno + 1));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> ConfigResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return err(format!("unknown key `{key}`"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, pair: &str) -> ConfigResult<()> {
        match pair.split_once('=') {
            Some((k, v)) => self.set(k.trim(), v.trim()),
            None => err(format!("override `{pair}` is not key=value")),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> ConfigResult<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError(format!("`{key}` = `{v}` is not a number"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> ConfigResult<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError(format!("`{key}` = `{v}` is not a nonnegative integer"))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn list_or(&self, key: &str, default: &[f64]) -> ConfigResult<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| ConfigError(format!("`{key}` entry `{x}` is not a number"))))
                .collect(),
        }
    }

    pub fn dimension(&self) -> ConfigResult<usize> {
        let d = self.usize_or("model.d", 1)?;
        if d == 0 {
            return err("model.d must be positive");
        }
        Ok(d)
    }

    /// Model triplet named by `model.kind` and its parameters.
    pub fn model(&self) -> ConfigResult<LevyTriplet> {
        let kind = self.get("model.kind").unwrap_or("gaussian");
        let model = match kind {
            "gaussian" | "normal" => LevyTriplet::gaussian(self.f64_or("model.v", 1.0)?),
            "cauchy" => LevyTriplet::cauchy(self.f64_or("model.c", 1.0)?),
            "stable" => LevyTriplet::stable(self.f64_or("model.alpha", 1.5)?),
            "laplace" | "exponential" => LevyTriplet::exponential(self.f64_or("model.rate", 1.0)?),
            "variance_gamma" | "gamma" => {
                LevyTriplet::gamma(self.f64_or("model.shape", 1.0)?, self.f64_or("model.scale", 1.0)?)
            }
            "nig" | "inverse_gaussian" => {
                LevyTriplet::inverse_gaussian(self.f64_or("model.intensity", 1.0)?, self.f64_or("model.rate", 1.0)?)
            }
            "logistic" | "gumbel" => LevyTriplet::gumbel(),
            "skellam" | "poisson" => LevyTriplet::poisson(self.f64_or("model.intensity", 1.0)?),
            other => return err(format!("unknown model.kind `{other}`")),
        }?;
        Ok(model.with_dimension(self.dimension()?))
    }

    /// Prior named by `prior.kind`.
    pub fn prior(&self) -> ConfigResult<PriorSpec> {
        let kind = self.get("prior.kind").unwrap_or("uniform");
        Ok(match kind {
            "uniform" | "flat" => PriorSpec::uniform(),
            "gaussian" => {
                let s2 = self.f64_or("prior.sigma2", 1.0)?;
                if s2 == 0.0 {
                    PriorSpec::point_mass(0.0)?
                } else {
                    PriorSpec::gaussian(s2)?
                }
            }
            "power_law" | "powerlaw" => PriorSpec::power_law(self.f64_or("prior.beta", 1.0)?, self.f64_or("prior.r0", 1.0)?)?,
            "point_mass" | "point" => PriorSpec::point_mass(self.f64_or("prior.location", 0.0)?)?,
            "student" => PriorSpec::student(self.f64_or("prior.beta", 2.0)?)?,
            other => return err(format!("unknown prior.kind `{other}`")),
        })
    }

    /// Grid from `grid.*`, defaulting to the symmetric grid of the given half-width and size.
    pub fn grid_or(&self, half_width: f64, n: usize) -> ConfigResult<Grid1D> {
        let n = self.usize_or("grid.n", n)?;
        if !n.is_power_of_two() || n > MAX_GRID_N || n < 16 {
            return err(format!("grid.n = {n} must be a power of two between 16 and {MAX_GRID_N}"));
        }
        let lower = self.f64_or("grid.lower", -half_width)?;
        let upper = self.f64_or("grid.upper", half_width)?;
        Ok(Grid1D::new(lower, upper, n)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut cfg = RunConfig::parse_text("# sweep\nmodel.kind = cauchy\nmodel.c = 2 # scale\n\n").unwrap();
        cfg.apply_override("model.c=3").unwrap();
        assert_eq!(cfg.f64_or("model.c", 1.0).unwrap(), 3.0);
        assert!(cfg.model().unwrap().label().starts_with("cauchy"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_grids() {
        assert!(RunConfig::parse_text("model.kindd = x").is_err());
        assert!(RunConfig::parse_text("model.kind").is_err());
        let cfg = RunConfig::parse_text("grid.n = 1000").unwrap();
        assert!(cfg.grid_or(10.0, 1024).is_err());
        let cfg = RunConfig::parse_text("grid.n = 131072").unwrap();
        assert!(cfg.grid_or(10.0, 1024).is_err());
    }

    #[test]
    fn lists() {
        let cfg = RunConfig::parse_text("schedule.r = 100, 1000,1e4").unwrap();
        assert_eq!(cfg.list_or("schedule.r", &[]).unwrap(), vec![100.0, 1000.0, 1e4]);
    }
}
