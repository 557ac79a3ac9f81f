//! `run` and `sweep`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use ufp_core::trace::{verdict_path, write_trace_file, write_verdict_file};
use ufp_core::{
    analyze_trace, check_properties, run_game, Forecaster, ForecasterSpec, GameConfig, NumericMode, ProtocolVariant,
    RoundRecord, SignPolicy, SkepticSpec, SkepticStrategy, TriggerReality, VerdictDocument,
};

use crate::grammar::{parse_forecaster, parse_skeptic, ParseError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ufp_core::Error> for CliError {
    fn from(e: ufp_core::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn spec_error(field: &str, text: &str, e: ParseError) -> CliError {
    CliError::Config(format!("--{field} {text:?}: {e}"))
}

fn default_stop() -> bool {
    true
}

/// One matchup. In sweep grids `stop_on_bankruptcy` defaults to true.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub id: Option<String>,
    pub forecaster: String,
    pub skeptic: String,
    #[serde(default)]
    pub variant: ProtocolVariant,
    #[serde(default)]
    pub mode: NumericMode,
    #[serde(alias = "rounds")]
    pub horizon: u64,
    #[serde(default)]
    pub sign_policy: SignPolicy,
    #[serde(default = "default_stop")]
    pub stop_on_bankruptcy: bool,
    pub out: PathBuf,
}

/// A config with its strategy strings parsed and files loaded.
#[derive(Clone, Debug)]
pub struct Matchup {
    pub forecaster_spec: ForecasterSpec,
    pub forecaster: Forecaster,
    pub skeptic_spec: SkepticSpec,
    pub skeptic: SkepticStrategy,
    pub game: GameConfig,
    pub sign_policy: SignPolicy,
}

impl RunConfig {
    pub fn resolve(&self) -> Result<Matchup, CliError> {
        if self.horizon == 0 {
            return Err(CliError::Config("horizon must be at least 1".into()));
        }
        let forecaster_spec =
            parse_forecaster(&self.forecaster).map_err(|e| spec_error("forecaster", &self.forecaster, e))?;
        let skeptic_spec = parse_skeptic(&self.skeptic).map_err(|e| spec_error("skeptic", &self.skeptic, e))?;
        let forecaster = Forecaster::from_spec(&forecaster_spec)?;
        let skeptic = SkepticStrategy::from_spec(&skeptic_spec)?;
        Ok(Matchup {
            forecaster_spec,
            forecaster,
            skeptic_spec,
            skeptic,
            game: GameConfig::new(self.horizon, self.mode, self.variant).stop_on_bankruptcy(self.stop_on_bankruptcy),
            sign_policy: self.sign_policy,
        })
    }
}

#[derive(Clone, Debug)]
pub struct GameReport {
    pub records: Vec<RoundRecord>,
    pub document: VerdictDocument,
}

impl Matchup {
    pub fn play(&self) -> Result<GameReport, CliError> {
        let mut skeptic = self.skeptic.clone();
        let mut reality = TriggerReality::new(self.sign_policy);
        let records = run_game(&self.forecaster, &mut skeptic, &mut reality, &self.game)?;
        let verdict = analyze_trace(&records)?;
        let properties = check_properties(&verdict, &records);
        Ok(GameReport {
            records,
            document: VerdictDocument { verdict, properties },
        })
    }
}

fn write_outputs(out: &Path, report: &GameReport) -> Result<(), CliError> {
    write_trace_file(out, &report.records)?;
    write_verdict_file(&verdict_path(out), &report.document)?;
    Ok(())
}

/// Plays one matchup and writes `<out>` (JSON lines) and `<out>.verdict.json`.
pub fn run_command(config: &RunConfig) -> Result<GameReport, CliError> {
    let report = config.resolve()?.play()?;
    write_outputs(&config.out, &report)?;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryRow {
    pub id: String,
    pub max_capital: String,
    pub bankrupt_at: Option<u64>,
    pub trigger_count: usize,
    pub kolmogorov_sum: String,
}

pub fn read_grid(path: &Path) -> Result<Vec<RunConfig>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// `<grid>.summary.csv`.
pub fn default_summary_path(grid: &Path) -> PathBuf {
    let mut name = grid.as_os_str().to_owned();
    name.push(".summary.csv");
    PathBuf::from(name)
}

/// Runs every config, in parallel, and writes all outputs only once every game
/// has finished without error.
pub fn sweep_command(grid: &[RunConfig], summary: &Path) -> Result<Vec<SummaryRow>, CliError> {
    if grid.is_empty() {
        return Err(CliError::Config("sweep grid is empty".into()));
    }
    let mut seen = HashSet::new();
    for config in grid {
        if !seen.insert(&config.out) {
            return Err(CliError::Config(format!("duplicate output path {}", config.out.display())));
        }
    }
    let matchups = grid.iter().map(RunConfig::resolve).collect::<Result<Vec<_>, _>>()?;

    let reports = matchups.par_iter().map(Matchup::play).collect::<Result<Vec<_>, _>>()?;

    let mut rows = Vec::with_capacity(grid.len());
    for (i, (config, report)) in grid.iter().zip(&reports).enumerate() {
        write_outputs(&config.out, report)?;
        let v = &report.document.verdict;
        rows.push(SummaryRow {
            id: config.id.clone().unwrap_or_else(|| i.to_string()),
            max_capital: v.max_capital.to_string(),
            bankrupt_at: v.bankrupt_at,
            trigger_count: v.trigger_rounds.len(),
            kolmogorov_sum: v.kolmogorov_sum_at_horizon.to_string(),
        });
    }
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", summary.display()));
    let mut writer = csv::Writer::from_path(summary).map_err(io)?;
    for row in &rows {
        writer.serialize(row).map_err(io)?;
    }
    writer.flush().map_err(|e| CliError::Io(format!("{}: {e}", summary.display())))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(skeptic: &str, out: PathBuf) -> RunConfig {
        RunConfig {
            id: None,
            forecaster: "constant:c=1".into(),
            skeptic: skeptic.into(),
            variant: ProtocolVariant::Standard,
            mode: NumericMode::Exact,
            horizon: 3,
            sign_policy: SignPolicy::PreferPositive,
            stop_on_bankruptcy: false,
            out,
        }
    }

    #[test]
    fn grid_json_defaults() {
        let grid: Vec<RunConfig> = serde_json::from_str(
            r#"[{"forecaster": "constant:c=1", "skeptic": "zero", "rounds": 5, "out": "a.jsonl"}]"#,
        )
        .unwrap();
        assert_eq!(grid[0].horizon, 5);
        assert!(grid[0].stop_on_bankruptcy);
        assert_eq!(grid[0].mode, NumericMode::Exact);
        assert_eq!(grid[0].sign_policy, SignPolicy::PreferPositive);
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_command(&config("negv:v=-1/10", dir.path().join("t"))).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("NegativeQuadraticStake"));
        assert!(!dir.path().join("t").exists());

        let err = run_command(&config("replay:/nonexistent/trace.jsonl", dir.path().join("t"))).unwrap_err();
        assert_eq!(err.exit_code(), 3);

        let err = run_command(&config("zero", dir.path().join("missing-dir/t"))).unwrap_err();
        assert_eq!(err.exit_code(), 3);

        let mut bad = config("zero", dir.path().join("t"));
        bad.horizon = 0;
        assert_eq!(run_command(&bad).unwrap_err().exit_code(), 2);
    }
}
