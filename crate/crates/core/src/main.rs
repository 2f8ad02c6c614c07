use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use liouville_lab::experiments::{run, Format, Scenario, ScenarioConfig};

/// Runs a numerical experiment for the planar Liouville equation and emits
/// its tables.
#[derive(Parser, Debug)]
#[command(name = "liouville-lab", version)]
struct Cli {
    /// Scenario name, e.g. `annulus-volume`.
    scenario: String,
    /// Line-oriented `key=value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files; tables go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or text.
    #[arg(long)]
    format: Option<String>,
    /// `key=value` overrides applied after the config file, e.g. `i=1..100`.
    overrides: Vec<String>,
}

const USAGE: u8 = 2;

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
    eprintln!("error: {msg}\nscenarios: {}", names.join(", "));
    ExitCode::from(USAGE)
}

fn build_config(cli: &Cli) -> Result<ScenarioConfig, String> {
    let scenario: Scenario = cli.scenario.parse().map_err(|e| format!("{e}"))?;
    let mut config = ScenarioConfig::defaults(scenario);
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        config.apply_text(&text).map_err(|e| e.to_string())?;
    }
    for kv in &cli.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
        config.set(k, v).map_err(|e| e.to_string())?;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    if let Some(f) = &cli.format {
        config.format = f.parse::<Format>().map_err(|e| e.to_string())?;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(msg) => return usage(msg),
    };
    let output = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &config.out {
        Some(dir) => match output.write(dir, config.format) {
            Ok(paths) => {
                for p in paths {
                    eprintln!("wrote {}", p.display());
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => {
            let mut stdout = std::io::stdout().lock();
            for (n, e) in output.emissions.iter().enumerate() {
                if n > 0 {
                    let _ = writeln!(stdout);
                }
                let _ = write!(stdout, "{}", e.render(config.format));
            }
        }
    }
    for c in &output.claims {
        eprintln!("[{}] {}: {}", c.status, c.description, c.detail);
    }
    ExitCode::from(output.exit_code() as u8)
}
