//! Flat `key = value` configuration, merged with command-line flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use islocc_core::amplitude::Statistics;
use islocc_core::noise::BellTarget;
use islocc_core::scan::{Constraint, Grid, OuterAxis, SweepPlan, ThresholdConfig};

const KEYS: &[&str] = &[
    "statistics",
    "theta",
    "target",
    "constraint",
    "p_grid",
    "indist_grid",
    "l_grid",
    "lprime",
    "output",
    "format",
    "tolerance",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(anyhow!("unknown format `{other}` (csv, json, svg)")),
        }
    }
}

/// Raw string settings; later layers override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key `{}`", n + 1, k.trim());
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v);
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("{key}: {e}")))
            .transpose()
    }

    pub fn statistics(&self) -> Result<Statistics> {
        Ok(self.parsed("statistics")?.unwrap_or(Statistics::Fermion))
    }

    pub fn theta(&self) -> Result<f64> {
        self.get("theta").map(parse_angle).transpose().map(|t| t.unwrap_or(0.0))
    }

    pub fn target(&self) -> Result<BellTarget> {
        Ok(self.parsed("target")?.unwrap_or(BellTarget::OneMinus))
    }

    pub fn format(&self) -> Result<Format> {
        Ok(self.parsed("format")?.unwrap_or(Format::Csv))
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.get("output").filter(|s| !s.is_empty() && *s != "-").map(PathBuf::from)
    }

    pub fn sweep_plan(&self) -> Result<SweepPlan> {
        let constraint = self.parsed("constraint")?.unwrap_or(Constraint::LEqRprime);
        let p_grid = self.parsed("p_grid")?.unwrap_or(Grid { start: 0.0, stop: 1.0, steps: 11 });
        let indist: Option<Grid> = self.parsed("indist_grid")?;
        let l: Option<Grid> = self.parsed("l_grid")?;
        let outer = match (indist, l) {
            (Some(_), Some(_)) => bail!("give either indist_grid or l_grid, not both"),
            (Some(g), None) => OuterAxis::Indist(g),
            (None, Some(g)) => OuterAxis::L(g),
            (None, None) if constraint == Constraint::LEqRprime => {
                OuterAxis::Indist(Grid { start: 0.0, stop: 1.0, steps: 11 })
            }
            (None, None) => OuterAxis::L(Grid { start: 0.1, stop: 0.9, steps: 9 }),
        };
        let plan = SweepPlan {
            statistics: self.statistics()?,
            theta: self.theta()?,
            target: self.target()?,
            constraint,
            p_grid,
            outer,
            lprime: self.parsed("lprime")?,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn threshold(&self) -> Result<ThresholdConfig> {
        if let Some(c) = self.parsed::<Constraint>("constraint")? {
            if c != Constraint::LEqRprime {
                bail!("threshold search runs on the l_eq_rprime family only");
            }
        }
        let cfg = ThresholdConfig {
            statistics: self.statistics()?,
            theta: self.theta()?,
            target: self.target()?,
            tolerance: self.parsed("tolerance")?.unwrap_or(1e-4),
            ..ThresholdConfig::default()
        };
        if !(cfg.tolerance > 0.0 && cfg.tolerance < 1.0) {
            bail!("tolerance must lie in (0, 1)");
        }
        Ok(cfg)
    }
}

/// Accepts plain radians, `pi`, `k*pi` and `pi/k`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    let bad = || anyhow!("theta `{s}` is not a number or multiple of pi");
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest.to_string()),
        None => (1.0, t),
    };
    let value = if t == "pi" {
        PI
    } else if let Some(k) = t.strip_suffix("*pi") {
        k.parse::<f64>().map_err(|_| bad())? * PI
    } else if let Some(k) = t.strip_prefix("pi/") {
        PI / k.parse::<f64>().map_err(|_| bad())?
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let s = Settings::parse("# sweep\nstatistics = boson\ntheta = pi  # switch\n\np-grid = 0:1:3\n").unwrap();
        assert_eq!(s.statistics().unwrap(), Statistics::Boson);
        assert_eq!(s.theta().unwrap(), PI);
        assert_eq!(s.sweep_plan().unwrap().p_grid.steps, 3);
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("statistics boson").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse("target = 1_plus").unwrap();
        s.set("target", Some("1_minus".into()));
        s.set("theta", None);
        assert_eq!(s.target().unwrap(), BellTarget::OneMinus);
        assert_eq!(s.theta().unwrap(), 0.0);
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn rejects_inconsistent_plans() {
        let mut s = Settings::default();
        s.set("constraint", Some("l_eq_lprime".into()));
        s.set("indist_grid", Some("0:1:3".into()));
        assert!(s.sweep_plan().is_err());
        let mut s = Settings::default();
        s.set("constraint", Some("free".into()));
        assert!(s.sweep_plan().is_err());
        s.set("lprime", Some("0.3".into()));
        assert!(s.sweep_plan().is_ok());
    }
}
