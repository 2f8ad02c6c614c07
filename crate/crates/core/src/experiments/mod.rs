//! Scenario runner: each scenario sweeps a family index, emits
//! machine-readable tables and checks its claims in-process.

mod config;
mod scenarios;
mod two_bubble;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use config::{parse_list, Format, Scenario, ScenarioConfig, GRID_NODES, RADIAL_NODES};
pub use two_bubble::{build_two_bubble, TwoBubbleSpec};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LLAB_THREADS";

/// One emitted document in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub stem: String,
    pub csv: String,
    pub text: String,
}

impl Emission {
    pub fn render(&self, format: Format) -> &str {
        match format {
            Format::Csv => &self.csv,
            Format::Text => &self.text,
        }
    }
}

/// Numeric table with a `# schema=` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    fn schema_line(&self) -> String {
        let mut s = format!("# schema={}/1", self.name);
        for (k, v) in &self.meta {
            s.push_str(&format!(" {k}={v}"));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n{}\n", self.schema_line(), self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n[table]\nname={}\n", self.schema_line(), self.name);
        for (k, v) in &self.meta {
            s.push_str(&format!("{k}={v}\n"));
        }
        for (n, row) in self.rows.iter().enumerate() {
            s.push_str(&format!("\n[row={n}]\n"));
            for (c, v) in self.columns.iter().zip(row) {
                s.push_str(&format!("{c}={v:.16e}\n"));
            }
        }
        s
    }

    /// Parses [`Self::to_csv`] output.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let schema = lines
            .next()
            .and_then(|l| l.strip_prefix("# schema="))
            .ok_or_else(|| Error::Parse("missing `# schema=` line".into()))?;
        let mut parts = schema.split(' ');
        let name = parts
            .next()
            .and_then(|n| n.strip_suffix("/1"))
            .ok_or_else(|| Error::Parse("bad schema name".into()))?
            .to_string();
        let meta = parts
            .filter_map(|kv| kv.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Parse("missing column header".into()))?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| Error::Parse(format!("`{c}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!("row `{line}` has {} cells", row.len())));
            }
            rows.push(row);
        }
        Ok(Self { name, meta, columns, rows })
    }

    pub fn emission(&self) -> Emission {
        Emission { stem: self.name.clone(), csv: self.to_csv(), text: self.to_text() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimStatus {
    Holds,
    Violated,
    /// Reported without assertion.
    Reported,
}

impl fmt::Display for ClaimStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Holds => "holds",
            Self::Violated => "violated",
            Self::Reported => "reported",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub description: String,
    pub status: ClaimStatus,
    pub detail: String,
}

impl Claim {
    pub fn check(description: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        let status = if holds { ClaimStatus::Holds } else { ClaimStatus::Violated };
        Self { description: description.into(), status, detail: detail.into() }
    }

    pub fn report(description: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { description: description.into(), status: ClaimStatus::Reported, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub scenario: Scenario,
    pub emissions: Vec<Emission>,
    pub claims: Vec<Claim>,
}

impl ScenarioOutput {
    /// True when no asserted claim is violated.
    pub fn claims_hold(&self) -> bool {
        self.claims.iter().all(|c| c.status != ClaimStatus::Violated)
    }

    /// Process exit status: 0 when the claims hold, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.claims_hold() {
            0
        } else {
            1
        }
    }

    /// The claims as an emission (`claim,status,detail`).
    pub fn claims_emission(&self) -> Emission {
        let stem = format!("{}-claims", self.scenario);
        let mut csv = format!("# schema=claims/1 scenario={}\nclaim,status,detail\n", self.scenario);
        let mut text = format!("# schema=claims/1\n[claims]\nscenario={}\n", self.scenario);
        for (n, c) in self.claims.iter().enumerate() {
            let clean = |s: &str| s.replace([',', '\n'], ";");
            csv.push_str(&format!("{},{},{}\n", clean(&c.description), c.status, clean(&c.detail)));
            text.push_str(&format!(
                "\n[claim={n}]\nclaim={}\nstatus={}\ndetail={}\n",
                c.description.replace('\n', " "),
                c.status,
                c.detail.replace('\n', " ")
            ));
        }
        Emission { stem, csv, text }
    }

    /// Writes every emission plus the claims to `dir` and returns the paths.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
        let ext = match format {
            Format::Csv => "csv",
            Format::Text => "txt",
        };
        let mut paths = Vec::new();
        for e in self.emissions.iter().chain(std::iter::once(&self.claims_emission())) {
            let path = dir.join(format!("{}.{ext}", e.stem));
            fs::write(&path, e.render(format)).map_err(|err| Error::Input(format!("{}: {err}", path.display())))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Worker count from `LLAB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs a scenario. Per-index work runs on a pool capped by
/// `LLAB_THREADS`; results are collected in index order, so output is
/// byte-identical across runs and thread counts.
pub fn run(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    pool.install(|| scenarios::dispatch(config))
}
