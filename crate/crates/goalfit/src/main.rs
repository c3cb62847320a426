//! Command-line front end: fit, forecast, evaluate, compare, simulate.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 sampler
//! failure. Options resolve as flags > config file > defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use goalfit::data::Scenario;
use goalfit::run::{self, DataSource, RunConfig, RunError};
use goalfit::simulate::{Evolution, SimConfig};
use goalfit_core::{Family, space::Dynamics};

#[derive(Parser)]
#[command(name = "goalfit", version, about = "Dynamic goal-based football models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write posterior draws, diagnostics, and summaries.
    Fit(CommonArgs),
    /// Forecast the scenario holdout from existing fit artifacts.
    Forecast(CommonArgs),
    /// Score a forecast CSV against the observed results.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Forecast CSV to score; defaults to <out>/forecast.csv.
        #[arg(long)]
        forecast: Option<PathBuf>,
    },
    /// Tabulate multiple metric reports, flagging the best per league.
    Compare {
        /// Metric JSON files (at least two).
        inputs: Vec<PathBuf>,
        /// Destination for the comparison CSV.
        #[arg(long, default_value = "comparison.csv")]
        out: PathBuf,
        /// Also print the comparison as a console table.
        #[arg(long)]
        table: bool,
    },
    /// Generate a synthetic league and its ground-truth parameters.
    Simulate {
        #[arg(long, default_value = "dp")]
        family: String,
        #[arg(long, default_value_t = 18)]
        teams: usize,
        #[arg(long, default_value_t = 2)]
        periods: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ability evolution: walk, identical, or independent.
        #[arg(long, default_value = "walk")]
        mode: String,
        #[arg(long, default_value = "sim")]
        out: PathBuf,
    },
}

/// Common run flags; all optional so a config file can fill the gaps.
#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat key=value config file (flags take precedence).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results CSV as `path[:season]`; repeatable.
    #[arg(long = "data")]
    data: Vec<String>,
    #[arg(long)]
    league: Option<String>,
    /// Likelihood family: dp, bp, dibp, nb, sm, zism.
    #[arg(long)]
    family: Option<String>,
    /// Ability dynamics: static, owen, egidi, weighted.
    #[arg(long)]
    dynamics: Option<String>,
    /// Holdout scenario: second-half, last3, last1, cutoff=N.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for run artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        RunError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(RunError::Config(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                no + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

impl CommonArgs {
    fn resolve(self) -> Result<RunConfig, RunError> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let from_file = |key: &str| file.get(key).cloned();
        let parse_num = |key: &str, v: String| {
            v.parse::<u64>()
                .map_err(|_| RunError::Config(format!("bad {key} value `{v}`")))
        };

        let data: Vec<String> = if self.data.is_empty() {
            from_file("data")
                .map(|v| v.split(',').map(str::to_string).collect())
                .unwrap_or_default()
        } else {
            self.data
        };
        let family_code =
            self.family.or_else(|| from_file("family")).unwrap_or_else(|| "dp".into());
        let family = Family::from_code(&family_code)
            .ok_or_else(|| RunError::Config(format!("unknown family `{family_code}`")))?;
        let dynamics_code = self
            .dynamics
            .or_else(|| from_file("dynamics"))
            .unwrap_or_else(|| "static".into());
        let dynamics = Dynamics::from_code(&dynamics_code)
            .ok_or_else(|| RunError::Config(format!("unknown dynamics `{dynamics_code}`")))?;
        let scenario_code = self
            .scenario
            .or_else(|| from_file("scenario"))
            .unwrap_or_else(|| "last1".into());
        let scenario = Scenario::parse(&scenario_code)
            .ok_or_else(|| RunError::Config(format!("unknown scenario `{scenario_code}`")))?;
        let number = |flag: Option<usize>, key: &str, default: usize| match flag {
            Some(v) => Ok(v),
            None => from_file(key)
                .map(|v| parse_num(key, v).map(|n| n as usize))
                .unwrap_or(Ok(default)),
        };

        Ok(RunConfig {
            data: data.iter().map(|d| DataSource::parse(d)).collect(),
            league: self
                .league
                .or_else(|| from_file("league"))
                .unwrap_or_else(|| "league".into()),
            family,
            dynamics,
            scenario,
            chains: number(self.chains, "chains", 4)?,
            warmup: number(self.warmup, "warmup", 1000)?,
            samples: number(self.samples, "samples", 1000)?,
            seed: match self.seed {
                Some(v) => v,
                None => from_file("seed").map(|v| parse_num("seed", v)).unwrap_or(Ok(0))?,
            },
            out: self
                .out
                .or_else(|| from_file("out").map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("run")),
        })
    }
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Fit(common) => {
            let config = common.resolve()?;
            let manifest = run::cmd_fit(&config)?;
            eprintln!(
                "fit complete: max rhat {:.4}, min bulk ESS {:.0}, {} divergences",
                manifest.diagnostics.max_rhat,
                manifest.diagnostics.min_ess_bulk,
                manifest.diagnostics.divergences
            );
            Ok(())
        }
        Command::Forecast(common) => {
            let config = common.resolve()?;
            let path = run::cmd_forecast(&config)?;
            eprintln!("forecast written to {}", path.display());
            Ok(())
        }
        Command::Evaluate { common, forecast } => {
            let config = common.resolve()?;
            let forecast_csv = forecast.unwrap_or_else(|| config.out.join("forecast.csv"));
            let path = run::cmd_evaluate(&config, &forecast_csv)?;
            println!("{}", std::fs::read_to_string(&path)?);
            Ok(())
        }
        Command::Compare { inputs, out, table } => {
            let console = run::cmd_compare(&inputs, &out)?;
            if table {
                print!("{console}");
            } else {
                println!("comparison written to {}", out.display());
            }
            Ok(())
        }
        Command::Simulate { family, teams, periods, seed, mode, out } => {
            let family = Family::from_code(&family)
                .ok_or_else(|| RunError::Config(format!("unknown family `{family}`")))?;
            let mut cfg = SimConfig::new(family, teams, periods, seed);
            cfg.evolution = match mode.as_str() {
                "walk" => Evolution::Walk { step_sd: 0.15 },
                "identical" => Evolution::Identical,
                "independent" => Evolution::Independent { sd: 1.0 },
                other => {
                    return Err(RunError::Config(format!("unknown simulate mode `{other}`")))
                }
            };
            let (csv_path, truth_path) = run::cmd_simulate(&cfg, &out)?;
            eprintln!(
                "wrote {} and {}",
                csv_path.display(),
                truth_path.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
