//! Scenario configuration: defaults per scenario, `key=value` files and
//! command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    GreenNullity,
    ShafrirSupInf,
    AnnulusVolume,
    RemarkCollapse,
    BubbleQuantization,
    SplitIdentity,
    TwoBubble,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::GreenNullity,
        Scenario::ShafrirSupInf,
        Scenario::AnnulusVolume,
        Scenario::RemarkCollapse,
        Scenario::BubbleQuantization,
        Scenario::SplitIdentity,
        Scenario::TwoBubble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::GreenNullity => "example1-green-nullity",
            Self::ShafrirSupInf => "shafrir-supinf",
            Self::AnnulusVolume => "annulus-volume",
            Self::RemarkCollapse => "remark-collapse",
            Self::BubbleQuantization => "bubble-quantization",
            Self::SplitIdentity => "split-identity",
            Self::TwoBubble => "two-bubble",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            other => Err(Error::Input(format!("unknown format `{other}` (csv or text)"))),
        }
    }
}

/// Bounds on user-supplied resolutions.
pub const RADIAL_NODES: (usize, usize) = (257, 1 << 20);
pub const GRID_NODES: (usize, usize) = (65, 2049);

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Family indices `i` (or `μ`), strictly increasing.
    pub indices: Vec<f64>,
    pub betas: Vec<f64>,
    pub c1: f64,
    pub k: f64,
    /// Evaluation radii (Green nullity) or the split radius (first entry).
    pub r_eval: Vec<f64>,
    pub radial_nodes: usize,
    pub grid_nodes: usize,
    /// Fixed two-bubble separation `r_i`; `None` uses `√M₀`.
    pub separation: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn powers_of_two(a: u32, b: u32) -> Vec<f64> {
    (a..=b).map(|k| 2f64.powi(k as i32)).collect()
}

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let mut c = Self {
            scenario,
            indices: Vec::new(),
            betas: vec![1.25, 1.5, 2.0, 3.0],
            c1: 1.0,
            k: 0.5,
            r_eval: vec![0.25, 0.5, 0.75],
            radial_nodes: 16385,
            grid_nodes: 1025,
            separation: None,
            out: None,
            format: Format::Csv,
        };
        match scenario {
            Scenario::GreenNullity => c.indices = powers_of_two(0, 7),
            Scenario::ShafrirSupInf => c.indices = powers_of_two(1, 10),
            Scenario::AnnulusVolume => c.indices = (8..=32).map(f64::from).collect(),
            Scenario::RemarkCollapse => c.indices = powers_of_two(2, 8),
            Scenario::BubbleQuantization => {
                c.indices = powers_of_two(1, 6);
                c.radial_nodes = 8193;
            }
            Scenario::SplitIdentity => {
                c.indices = (1..=64).map(f64::from).collect();
                c.r_eval = vec![0.5];
            }
            Scenario::TwoBubble => c.indices = powers_of_two(2, 5),
        }
        c
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |v: &str| v.parse::<f64>().map_err(|e| Error::Input(format!("`{key}={v}`: {e}")));
        let int = |v: &str| v.parse::<usize>().map_err(|e| Error::Input(format!("`{key}={v}`: {e}")));
        match key.trim() {
            "scenario" => {
                let sc: Scenario = value.parse()?;
                if sc != self.scenario {
                    return Err(Error::Input(format!("config is for `{sc}`, running `{}`", self.scenario)));
                }
            }
            "i" | "mu" | "index" => self.indices = parse_list(value)?,
            "beta" => self.betas = parse_list(value)?,
            "c1" => self.c1 = num(value)?,
            "k" => self.k = num(value)?,
            "r" | "r_eval" | "radius" => self.r_eval = parse_list(value)?,
            "nodes" | "radial_nodes" => self.radial_nodes = int(value)?,
            "grid" | "grid_nodes" => self.grid_nodes = int(value)?,
            "separation" => self.separation = Some(num(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            other => return Err(Error::Input(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a line-oriented `key=value` document; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("line {}: expected key=value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::Input("index list is empty".into()));
        }
        if self.indices.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("index list must be strictly increasing".into()));
        }
        if self.indices.iter().any(|i| !(*i > 0.0) || !i.is_finite()) {
            return Err(Error::Input("indices must be positive".into()));
        }
        if !(RADIAL_NODES.0..=RADIAL_NODES.1).contains(&self.radial_nodes) {
            return Err(Error::Input(format!("radial nodes must lie in {RADIAL_NODES:?}")));
        }
        if !(GRID_NODES.0..=GRID_NODES.1).contains(&self.grid_nodes) {
            return Err(Error::Input(format!("grid nodes must lie in {GRID_NODES:?}")));
        }
        if self.betas.is_empty() || self.betas.iter().any(|b| !(*b > 1.0)) {
            return Err(Error::Input("beta values must exceed 1".into()));
        }
        if self.r_eval.is_empty() || self.r_eval.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::Input("radii must lie in (0, 1)".into()));
        }
        if !(self.k > 0.0) || !(self.c1 > 0.0) {
            return Err(Error::Input("k and c1 must be positive".into()));
        }
        if let Some(s) = self.separation {
            if !(s > 1.0) {
                return Err(Error::Input("separation must exceed 1".into()));
            }
        }
        Ok(())
    }
}

/// Parses `a,b,c`, the integer range `a..b`, or the geometric range
/// `a..b*f`.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    let bad = |e: &dyn fmt::Display| Error::Input(format!("bad list `{s}`: {e}"));
    if let Some((a, rest)) = s.split_once("..") {
        let a: f64 = a.trim().parse().map_err(|e| bad(&e))?;
        let (b, factor) = match rest.split_once('*') {
            Some((b, f)) => (b, Some(f.trim().parse::<f64>().map_err(|e| bad(&e))?)),
            None => (rest, None),
        };
        let b: f64 = b.trim().parse().map_err(|e| bad(&e))?;
        if !(b >= a) {
            return Err(bad(&"empty range"));
        }
        let mut out = Vec::new();
        let mut x = a;
        match factor {
            Some(f) if f > 1.0 && a > 0.0 => {
                while x <= b * (1.0 + 1e-12) {
                    out.push(x);
                    x *= f;
                }
            }
            Some(_) => return Err(bad(&"geometric ranges need a > 0 and factor > 1")),
            None => {
                while x <= b + 1e-9 {
                    out.push(x);
                    x += 1.0;
                }
            }
        }
        return Ok(out);
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| bad(&e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("1..4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_list("4..32*2").unwrap(), vec![4.0, 8.0, 16.0, 32.0]);
        assert_eq!(parse_list("1.5, 2").unwrap(), vec![1.5, 2.0]);
        assert!(parse_list("3..1").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn config_text_and_validation() {
        let mut c = ScenarioConfig::defaults(Scenario::AnnulusVolume);
        c.apply_text("# comment\nscenario=annulus-volume\ni=1..32\nformat=text\n").unwrap();
        assert_eq!(c.indices.len(), 32);
        assert_eq!(c.format, Format::Text);
        c.validate().unwrap();
        assert!(c.apply_text("scenario=two-bubble").is_err());
        assert!(c.apply_text("colour=red").is_err());
        c.set("i", "4,2").unwrap();
        assert!(c.validate().is_err());
        c.set("i", "2..4").unwrap();
        c.set("grid", "8").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("nope".parse::<Scenario>().is_err());
    }
}
