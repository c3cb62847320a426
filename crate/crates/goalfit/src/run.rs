//! Run drivers: fitting, forecasting, evaluation, and comparison, with
//! reproducible on-disk artifacts and a run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use goalfit_core::likelihoods::Family;
use goalfit_core::predict::{forecast, summarize_abilities, AbilityKind, Fixture};
use goalfit_core::sampler::{
    sample_chain, ChainOutput, PosteriorDraws, Progress, SamplerConfig,
};
use goalfit_core::space::{Dynamics, HyperParams, ModelSpec, ParameterSpace};
use goalfit_core::{diagnostics, metrics, PosteriorDensity};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{
    self, parse_matches, periodize, split_for_scenario, DataError, FitSplit, Scenario,
};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(#[from] DataError),
    #[error("sampler: {0}")]
    Sampler(String),
    #[error("artifact mismatch: {0}")]
    ArtifactMismatch(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 config, 3 data, 4 sampler failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::ArtifactMismatch(_) | RunError::Io(_) => 2,
            RunError::Data(_) => 3,
            RunError::Sampler(_) => 4,
        }
    }
}

/// One input CSV plus its season label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSource {
    pub path: PathBuf,
    pub season: String,
}

impl DataSource {
    /// Parse `path[:season]`; the season defaults to the file stem.
    pub fn parse(text: &str) -> DataSource {
        match text.rsplit_once(':') {
            // Keep Windows-style drive letters intact.
            Some((path, season)) if !season.contains(['/', '\\']) && path.len() > 1 => {
                DataSource { path: PathBuf::from(path), season: season.to_string() }
            }
            _ => {
                let path = PathBuf::from(text);
                let season = path
                    .file_stem()
                    .map_or_else(|| text.to_string(), |s| s.to_string_lossy().into_owned());
                DataSource { path, season }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: Vec<DataSource>,
    pub league: String,
    pub family: Family,
    pub dynamics: Dynamics,
    pub scenario: Scenario,
    pub chains: usize,
    pub warmup: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    /// Flat echo of everything that determines the outputs, except the
    /// output directory itself.
    fn echo(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let files: Vec<String> = self
            .data
            .iter()
            .map(|d| format!("{}:{}", d.path.display(), d.season))
            .collect();
        map.insert("data".into(), files.join(","));
        map.insert("league".into(), self.league.clone());
        map.insert("family".into(), self.family.code().into());
        map.insert("dynamics".into(), self.dynamics.code().into());
        map.insert("scenario".into(), self.scenario.label());
        map.insert("chains".into(), self.chains.to_string());
        map.insert("warmup".into(), self.warmup.to_string());
        map.insert("samples".into(), self.samples.to_string());
        map.insert("seed".into(), self.seed.to_string());
        map
    }

    fn config_hash(&self, data_checksums: &BTreeMap<String, String>) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.echo() {
            hasher.update(k.as_bytes());
            hasher.update(b"=");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        for (k, v) in data_checksums {
            hasher.update(k.as_bytes());
            hasher.update(b"#");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        hex_digest(hasher)
    }
}

fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_digest(hasher))
}

/// Exclusive-run guard: creates `<out>/.lock`, removed on drop.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(out: &Path) -> Result<RunLock, RunError> {
        fs::create_dir_all(out)?;
        let path = out.join(".lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(RunLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(RunError::Config(
                format!("output directory is locked by another run: {}", path.display()),
            )),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiagnosticsSummary {
    pub max_rhat: f64,
    pub min_ess_bulk: f64,
    pub min_ess_tail: f64,
    pub divergences: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub config_hash: String,
    pub data_checksums: BTreeMap<String, String>,
    pub timings_secs: BTreeMap<String, f64>,
    pub diagnostics: DiagnosticsSummary,
    /// Output file name -> sha256, updated as later phases add files.
    pub outputs: BTreeMap<String, String>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn save_manifest(out: &Path, manifest: &Manifest) -> Result<(), RunError> {
    let json = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    write_atomic(&out.join("manifest.json"), &json)?;
    Ok(())
}

fn load_manifest(out: &Path) -> Result<Manifest, RunError> {
    let path = out.join("manifest.json");
    let bytes = fs::read(&path).map_err(|_| {
        RunError::ArtifactMismatch(format!("no manifest at {}", path.display()))
    })?;
    serde_json::from_slice(&bytes)
        .map_err(|e| RunError::ArtifactMismatch(format!("unreadable manifest: {e}")))
}

fn record_output(manifest: &mut Manifest, out: &Path, name: &str) -> Result<(), RunError> {
    manifest.outputs.insert(name.to_string(), sha256_file(&out.join(name))?);
    Ok(())
}

/// Load and split the configured data files.
fn load_split(config: &RunConfig) -> Result<(FitSplit, BTreeMap<String, String>), RunError> {
    if config.data.is_empty() {
        return Err(RunError::Config("no data files given".into()));
    }
    let mut records = Vec::new();
    let mut checksums = BTreeMap::new();
    for source in &config.data {
        let file = fs::File::open(&source.path).map_err(|e| {
            RunError::Data(DataError::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", source.path.display()),
            )))
        })?;
        records.extend(parse_matches(file, &source.season)?);
        checksums.insert(source.path.display().to_string(), sha256_file(&source.path)?);
    }
    let dataset = periodize(records)?;
    let split = split_for_scenario(&dataset, config.scenario)?;
    Ok((split, checksums))
}

fn build_space(config: &RunConfig, split: &FitSplit) -> Result<ParameterSpace, RunError> {
    let spec = ModelSpec {
        family: config.family,
        dynamics: config.dynamics,
        n_teams: split.train.registry.len(),
        n_periods: split.train.n_periods as usize,
        hyper: HyperParams::default(),
    };
    ParameterSpace::build(spec).map_err(|e| RunError::Config(format!("{e:?}")))
}

/// Run all chains across threads. Chain RNG streams depend only on
/// (seed, index), so the result is identical to a sequential run.
pub fn sample_parallel(
    density: &PosteriorDensity,
    sampler: &SamplerConfig,
) -> Result<PosteriorDraws, RunError> {
    let chains: Vec<Result<ChainOutput, _>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..sampler.n_chains)
            .map(|c| scope.spawn(move || sample_chain(density, sampler, c, &|_: Progress| {})))
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let mut outputs = Vec::with_capacity(chains.len());
    for (idx, chain) in chains.into_iter().enumerate() {
        outputs.push(chain.map_err(|e| RunError::Sampler(format!("chain {idx}: {e}")))?);
    }
    Ok(PosteriorDraws::from_chains(density.space().dim(), sampler.n_samples, outputs))
}

/// Constrained draw matrix: for each chain, rows of flattened views.
fn constrained_matrix(space: &ParameterSpace, draws: &PosteriorDraws) -> Vec<Vec<Vec<f64>>> {
    (0..draws.n_chains)
        .map(|c| {
            (0..draws.n_samples)
                .map(|i| {
                    let view = space.constrain(draws.draw(c, i)).expect("draws constrain");
                    space.flatten_view(&view)
                })
                .collect()
        })
        .collect()
}

fn write_draws_csv(
    path: &Path,
    names: &[String],
    matrix: &[Vec<Vec<f64>>],
) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    let mut header = vec!["chain".to_string(), "iteration".to_string()];
    header.extend_from_slice(names);
    w.write_record(&header).map_err(io_of_csv)?;
    for (chain, rows) in matrix.iter().enumerate() {
        for (iter, row) in rows.iter().enumerate() {
            let mut record = vec![chain.to_string(), iter.to_string()];
            record.extend(row.iter().map(|v| format!("{v:.17e}")));
            w.write_record(&record).map_err(io_of_csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Unconstrained-coordinate cache so later phases can reload the draws
/// without re-deriving the transform; the constrained CSV is the contract.
fn write_raw_draws(path: &Path, draws: &PosteriorDraws) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    let mut header = vec!["chain".to_string(), "iteration".to_string()];
    header.extend((0..draws.dim).map(|i| format!("u{i}")));
    w.write_record(&header).map_err(io_of_csv)?;
    for c in 0..draws.n_chains {
        for i in 0..draws.n_samples {
            let mut record = vec![c.to_string(), i.to_string()];
            record.extend(draws.draw(c, i).iter().map(|v| format!("{v:.17e}")));
            w.write_record(&record).map_err(io_of_csv)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_raw_draws(path: &Path, dim: usize) -> Result<PosteriorDraws, RunError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| {
        RunError::ArtifactMismatch(format!("missing draw cache {}: {e}", path.display()))
    })?;
    let mut per_chain: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(io_of_csv)?;
        let chain: usize = record[0]
            .parse()
            .map_err(|_| RunError::ArtifactMismatch("bad chain index in cache".into()))?;
        let row = per_chain.entry(chain).or_default();
        for v in record.iter().skip(2) {
            row.push(v.parse().map_err(|_| {
                RunError::ArtifactMismatch("bad value in draw cache".into())
            })?);
        }
    }
    let n_samples = per_chain
        .values()
        .next()
        .map_or(0, |v| v.len() / dim);
    if n_samples == 0 {
        return Err(RunError::ArtifactMismatch("empty draw cache".into()));
    }
    let chains: Vec<ChainOutput> = per_chain
        .into_values()
        .map(|draws| ChainOutput {
            draws,
            stats: goalfit_core::sampler::ChainStats {
                divergences: 0,
                step_size: f64::NAN,
                mean_accept: f64::NAN,
            },
        })
        .collect();
    Ok(PosteriorDraws::from_chains(dim, n_samples, chains))
}

fn io_of_csv(e: csv::Error) -> RunError {
    RunError::Io(std::io::Error::other(e))
}

fn write_diagnostics_csv(
    path: &Path,
    names: &[String],
    matrix: &[Vec<Vec<f64>>],
    divergences: usize,
) -> Result<(DiagnosticsSummary, Vec<(String, f64, f64, f64)>), RunError> {
    let mut rows = Vec::with_capacity(names.len());
    let mut summary = DiagnosticsSummary {
        max_rhat: f64::NEG_INFINITY,
        min_ess_bulk: f64::INFINITY,
        min_ess_tail: f64::INFINITY,
        divergences,
    };
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    w.write_record(["parameter", "rhat", "ess_bulk", "ess_tail"]).map_err(io_of_csv)?;
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); matrix.len()];
    for (p, name) in names.iter().enumerate() {
        for (c, rows_of_chain) in matrix.iter().enumerate() {
            series[c].clear();
            series[c].extend(rows_of_chain.iter().map(|r| r[p]));
        }
        let refs: Vec<&[f64]> = series.iter().map(|v| v.as_slice()).collect();
        let rhat = diagnostics::split_rhat(&refs);
        let bulk = diagnostics::ess_bulk(&refs);
        let tail = diagnostics::ess_tail(&refs);
        // Constant (structurally pinned) parameters don't gate convergence.
        if !bulk.degenerate {
            summary.max_rhat = summary.max_rhat.max(rhat);
            summary.min_ess_bulk = summary.min_ess_bulk.min(bulk.value);
            summary.min_ess_tail = summary.min_ess_tail.min(tail.value);
        }
        w.write_record([
            name.as_str(),
            &format!("{rhat:.6}"),
            &format!("{:.1}", bulk.value),
            &format!("{:.1}", tail.value),
        ])
        .map_err(io_of_csv)?;
        rows.push((name.clone(), rhat, bulk.value, tail.value));
    }
    w.flush()?;
    Ok((summary, rows))
}

fn write_abilities_csv(
    path: &Path,
    space: &ParameterSpace,
    draws: &PosteriorDraws,
    registry: &crate::data::TeamRegistry,
) -> Result<(), RunError> {
    let rows = summarize_abilities(space, draws)
        .map_err(|e| RunError::Sampler(format!("no draws to summarize: {e}")))?;
    let mut w = csv::Writer::from_path(path).map_err(io_of_csv)?;
    w.write_record(["team", "period", "type", "mean", "q25", "q75", "q025", "q975"])
        .map_err(io_of_csv)?;
    for r in rows {
        let kind = match r.kind {
            AbilityKind::Attack => "att",
            AbilityKind::Defense => "def",
        };
        w.write_record([
            registry.name(r.team),
            &(r.period + 1).to_string(),
            kind,
            &format!("{:.6}", r.mean),
            &format!("{:.6}", r.q25),
            &format!("{:.6}", r.q75),
            &format!("{:.6}", r.q025),
            &format!("{:.6}", r.q975),
        ])
        .map_err(io_of_csv)?;
    }
    w.flush()?;
    Ok(())
}

/// Fit the model and write the draw archive, diagnostics, ability
/// summaries, and manifest into the output directory.
pub fn cmd_fit(config: &RunConfig) -> Result<Manifest, RunError> {
    let _lock = RunLock::acquire(&config.out)?;
    let t_total = Instant::now();
    let (split, data_checksums) = load_split(config)?;
    let space = build_space(config, &split)?;
    let rows = data::training_rows(&split.train);
    let density = PosteriorDensity::new(&space, &rows);

    let sampler = SamplerConfig {
        n_chains: config.chains,
        n_warmup: config.warmup,
        n_samples: config.samples,
        seed: config.seed,
        ..SamplerConfig::default()
    };
    let t_sample = Instant::now();
    let draws = sample_parallel(&density, &sampler)?;
    let sample_secs = t_sample.elapsed().as_secs_f64();

    let t_write = Instant::now();
    let names = space.constrained_names();
    let matrix = constrained_matrix(&space, &draws);
    write_draws_csv(&config.out.join("draws.csv"), &names, &matrix)?;
    write_raw_draws(&config.out.join("draws_raw.csv"), &draws)?;
    let (summary, _) = write_diagnostics_csv(
        &config.out.join("diagnostics.csv"),
        &names,
        &matrix,
        draws.total_divergences(),
    )?;
    write_abilities_csv(
        &config.out.join("abilities.csv"),
        &space,
        &draws,
        &split.train.registry,
    )?;

    let mut timings = BTreeMap::new();
    timings.insert("sampling".into(), sample_secs);
    timings.insert("artifacts".into(), t_write.elapsed().as_secs_f64());
    timings.insert("total".into(), t_total.elapsed().as_secs_f64());

    let mut manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.echo(),
        config_hash: config.config_hash(&data_checksums),
        data_checksums,
        timings_secs: timings,
        diagnostics: summary,
        outputs: BTreeMap::new(),
    };
    for name in ["draws.csv", "draws_raw.csv", "diagnostics.csv", "abilities.csv"] {
        record_output(&mut manifest, &config.out, name)?;
    }
    save_manifest(&config.out, &manifest)?;
    Ok(manifest)
}

/// Forecast the scenario holdout from existing fit artifacts.
pub fn cmd_forecast(config: &RunConfig) -> Result<PathBuf, RunError> {
    let (split, data_checksums) = load_split(config)?;
    let mut manifest = load_manifest(&config.out)?;
    let expected = config.config_hash(&data_checksums);
    if manifest.config_hash != expected {
        return Err(RunError::ArtifactMismatch(format!(
            "fit artifacts were produced by a different configuration \
             (manifest {}, current {expected})",
            manifest.config_hash
        )));
    }
    let space = build_space(config, &split)?;
    let draws = read_raw_draws(&config.out.join("draws_raw.csv"), space.dim())?;

    let fixtures: Vec<Fixture> = split
        .holdout
        .iter()
        .map(|(m, period)| Fixture {
            home: split.train.registry.index(&m.home_team).expect("registry covers holdout"),
            away: split.train.registry.index(&m.away_team).expect("registry covers holdout"),
            period: (*period - 1) as usize,
        })
        .collect();
    let set = forecast(&space, &draws, &fixtures)
        .map_err(|e| RunError::Config(format!("forecast: {e}")))?;

    let path = config.out.join("forecast.csv");
    let mut w = csv::Writer::from_path(&path).map_err(io_of_csv)?;
    w.write_record(["match_id", "date", "home", "away", "p_home", "p_draw", "p_away"])
        .map_err(io_of_csv)?;
    for (i, ((m, _), f)) in split.holdout.iter().zip(&set.forecasts).enumerate() {
        w.write_record([
            i.to_string(),
            m.date.format("%d/%m/%Y").to_string(),
            m.home_team.clone(),
            m.away_team.clone(),
            format!("{:.12}", f.p_home),
            format!("{:.12}", f.p_draw),
            format!("{:.12}", f.p_away),
        ])
        .map_err(io_of_csv)?;
    }
    w.flush()?;
    record_output(&mut manifest, &config.out, "forecast.csv")?;
    save_manifest(&config.out, &manifest)?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReportFile {
    pub league: String,
    pub family: String,
    pub dynamics: String,
    pub scenario: String,
    pub brier: f64,
    pub acp: f64,
    pub rps: f64,
    pub pseudo_r2: f64,
    pub n_matches: usize,
}

/// Score a forecast CSV against the observed results.
pub fn cmd_evaluate(config: &RunConfig, forecast_csv: &Path) -> Result<PathBuf, RunError> {
    let (split, _) = load_split(config)?;
    let observed: BTreeMap<(String, String, String), (u32, u32)> = split
        .holdout
        .iter()
        .map(|(m, _)| {
            (
                (m.date.format("%d/%m/%Y").to_string(), m.home_team.clone(), m.away_team.clone()),
                (m.home_goals, m.away_goals),
            )
        })
        .collect();

    let mut reader = csv::Reader::from_path(forecast_csv).map_err(|e| {
        RunError::Data(DataError::Io(std::io::Error::other(format!(
            "{}: {e}",
            forecast_csv.display()
        ))))
    })?;
    let mut probs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(io_of_csv)?;
        let key = (record[1].to_string(), record[2].to_string(), record[3].to_string());
        let Some(&(hg, ag)) = observed.get(&key) else {
            return Err(RunError::Data(DataError::BadRow {
                line: record.position().map_or(0, |p| p.line()),
                reason: format!("forecast row {key:?} has no observed result"),
            }));
        };
        let parse = |i: usize| -> Result<f64, RunError> {
            record[i].parse().map_err(|_| {
                RunError::Data(DataError::BadRow {
                    line: record.position().map_or(0, |p| p.line()),
                    reason: format!("bad probability `{}`", &record[i]),
                })
            })
        };
        probs.push(metrics::OutcomeProbs {
            p: [parse(4)?, parse(5)?, parse(6)?],
            observed: metrics::Outcome::from_goals(hg, ag),
        });
    }
    let report = metrics::evaluate(&probs)
        .map_err(|_| RunError::Data(DataError::Empty))?;
    let file = MetricsReportFile {
        league: config.league.clone(),
        family: config.family.code().to_string(),
        dynamics: config.dynamics.code().to_string(),
        scenario: config.scenario.label(),
        brier: report.brier,
        acp: report.acp,
        rps: report.rps,
        pseudo_r2: report.pseudo_r2,
        n_matches: report.n_matches,
    };
    let path = config.out.join("metrics.json");
    write_atomic(&path, &serde_json::to_vec_pretty(&file).expect("serializes"))?;
    if let Ok(mut manifest) = load_manifest(&config.out) {
        record_output(&mut manifest, &config.out, "metrics.json")?;
        save_manifest(&config.out, &manifest)?;
    }
    Ok(path)
}

/// Comparison row with per-league best-metric flags.
#[derive(Debug, Serialize)]
pub struct CompareRow {
    #[serde(flatten)]
    pub report: MetricsReportFile,
    pub best_brier: bool,
    pub best_acp: bool,
    pub best_rps: bool,
    pub best_pseudo_r2: bool,
}

pub fn compare_reports(reports: Vec<MetricsReportFile>) -> Result<Vec<CompareRow>, RunError> {
    if reports.len() < 2 {
        return Err(RunError::Config("compare needs at least two reports".into()));
    }
    let mut rows: Vec<CompareRow> = reports
        .into_iter()
        .map(|report| CompareRow {
            report,
            best_brier: false,
            best_acp: false,
            best_rps: false,
            best_pseudo_r2: false,
        })
        .collect();
    let leagues: Vec<String> =
        rows.iter().map(|r| r.report.league.clone()).collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
    for league in leagues {
        let idx: Vec<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.report.league == league)
            .map(|(i, _)| i)
            .collect();
        let best = |get: &dyn Fn(&MetricsReportFile) -> f64, lower: bool| -> f64 {
            idx.iter()
                .map(|&i| get(&rows[i].report))
                .fold(if lower { f64::INFINITY } else { f64::NEG_INFINITY }, |a, b| {
                    if lower {
                        a.min(b)
                    } else {
                        a.max(b)
                    }
                })
        };
        let b_brier = best(&|r| r.brier, true);
        let b_rps = best(&|r| r.rps, true);
        let b_acp = best(&|r| r.acp, false);
        let b_r2 = best(&|r| r.pseudo_r2, false);
        for &i in &idx {
            // Ties flag every row that attains the optimum.
            rows[i].best_brier = rows[i].report.brier == b_brier;
            rows[i].best_rps = rows[i].report.rps == b_rps;
            rows[i].best_acp = rows[i].report.acp == b_acp;
            rows[i].best_pseudo_r2 = rows[i].report.pseudo_r2 == b_r2;
        }
    }
    Ok(rows)
}

/// Read metric JSONs, build the comparison table, write it as CSV, and
/// return the console rendering.
pub fn cmd_compare(inputs: &[PathBuf], out_csv: &Path) -> Result<String, RunError> {
    let mut reports = Vec::new();
    for path in inputs {
        let bytes = fs::read(path)?;
        let report: MetricsReportFile = serde_json::from_slice(&bytes).map_err(|e| {
            RunError::Config(format!("schema mismatch in {}: {e}", path.display()))
        })?;
        reports.push(report);
    }
    let rows = compare_reports(reports)?;

    let mut w = csv::Writer::from_path(out_csv).map_err(io_of_csv)?;
    w.write_record([
        "league", "family", "dynamics", "scenario", "brier", "acp", "rps", "pseudo_r2",
        "n_matches", "best_brier", "best_acp", "best_rps", "best_pseudo_r2",
    ])
    .map_err(io_of_csv)?;
    let mut console = String::new();
    console.push_str(&format!(
        "{:<12} {:<6} {:<9} {:<12} {:>8} {:>8} {:>8} {:>10}\n",
        "league", "family", "dynamics", "scenario", "brier", "acp", "rps", "pseudo_r2"
    ));
    for row in &rows {
        let r = &row.report;
        w.write_record([
            r.league.clone(),
            r.family.clone(),
            r.dynamics.clone(),
            r.scenario.clone(),
            format!("{:.6}", r.brier),
            format!("{:.6}", r.acp),
            format!("{:.6}", r.rps),
            format!("{:.6}", r.pseudo_r2),
            r.n_matches.to_string(),
            row.best_brier.to_string(),
            row.best_acp.to_string(),
            row.best_rps.to_string(),
            row.best_pseudo_r2.to_string(),
        ])
        .map_err(io_of_csv)?;
        let mark = |flag: bool| if flag { "*" } else { " " };
        console.push_str(&format!(
            "{:<12} {:<6} {:<9} {:<12} {:>7.3}{} {:>7.3}{} {:>7.3}{} {:>9.3}{}\n",
            r.league,
            r.family,
            r.dynamics,
            r.scenario,
            r.brier,
            mark(row.best_brier),
            r.acp,
            mark(row.best_acp),
            r.rps,
            mark(row.best_rps),
            r.pseudo_r2,
            mark(row.best_pseudo_r2),
        ));
    }
    w.flush()?;
    Ok(console)
}

/// Generate a synthetic dataset plus its ground truth into a directory.
pub fn cmd_simulate(
    cfg: &crate::simulate::SimConfig,
    out: &Path,
) -> Result<(PathBuf, PathBuf), RunError> {
    fs::create_dir_all(out)?;
    let (records, truth) = crate::simulate::simulate(cfg);
    let csv_path = out.join("matches.csv");
    let mut file = fs::File::create(&csv_path)?;
    crate::simulate::write_csv(&records, &mut file).map_err(io_of_csv)?;
    file.flush()?;
    let truth_path = out.join("truth.json");
    write_atomic(&truth_path, &serde_json::to_vec_pretty(&truth).expect("serializes"))?;
    Ok((csv_path, truth_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{Evolution, SimConfig};

    fn toy_config(dir: &Path, seed: u64) -> RunConfig {
        let mut sim = SimConfig::new(Family::DoublePoisson, 4, 2, 11);
        sim.evolution = Evolution::Walk { step_sd: 0.1 };
        let (csv_path, _) = cmd_simulate(&sim, dir).unwrap();
        RunConfig {
            data: vec![DataSource { path: csv_path, season: "S01".into() }],
            league: "toy".into(),
            family: Family::DoublePoisson,
            dynamics: Dynamics::Owen,
            scenario: Scenario::LastRound,
            chains: 2,
            warmup: 150,
            samples: 150,
            seed,
            out: dir.join("run"),
        }
    }

    #[test]
    fn fit_forecast_evaluate_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let config = toy_config(dir.path(), 3);
        let manifest = cmd_fit(&config).unwrap();
        assert!(manifest.outputs.contains_key("draws.csv"));
        assert!(manifest.diagnostics.max_rhat.is_finite());
        // Listed checksums match the files on disk.
        for (name, checksum) in &manifest.outputs {
            assert_eq!(sha256_file(&config.out.join(name)).unwrap(), *checksum, "{name}");
        }

        let forecast_csv = cmd_forecast(&config).unwrap();
        let body = fs::read_to_string(&forecast_csv).unwrap();
        // 4 teams -> 2 matches in the final round.
        assert_eq!(body.lines().count(), 1 + 2);
        for line in body.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let total: f64 = fields[4..7].iter().map(|v| v.parse::<f64>().unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-9, "row sums to {total}");
        }

        let metrics_path = cmd_evaluate(&config, &forecast_csv).unwrap();
        let report: MetricsReportFile =
            serde_json::from_slice(&fs::read(metrics_path).unwrap()).unwrap();
        assert_eq!(report.n_matches, 2);
        assert!(report.brier >= 0.0 && report.brier <= 2.0);
    }

    #[test]
    fn same_seed_gives_identical_archives() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = toy_config(dir.path(), 21);
        cmd_fit(&config).unwrap();
        let first = fs::read(config.out.join("draws.csv")).unwrap();
        let out2 = dir.path().join("run2");
        config.out = out2;
        cmd_fit(&config).unwrap();
        let second = fs::read(config.out.join("draws.csv")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn forecast_rejects_mismatched_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = toy_config(dir.path(), 5);
        cmd_fit(&config).unwrap();
        config.seed += 1;
        match cmd_forecast(&config) {
            Err(RunError::ArtifactMismatch(_)) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn lock_excludes_concurrent_runs() {
        let dir = tempfile::tempdir().unwrap();
        let lock = RunLock::acquire(dir.path()).unwrap();
        match RunLock::acquire(dir.path()) {
            Err(RunError::Config(_)) => {}
            other => panic!("unexpected: {other:?}"),
        }
        drop(lock);
        RunLock::acquire(dir.path()).unwrap();
    }

    #[test]
    fn compare_flags_best_rows() {
        let report = |league: &str, family: &str, brier: f64, acp: f64| MetricsReportFile {
            league: league.into(),
            family: family.into(),
            dynamics: "weighted".into(),
            scenario: "last1".into(),
            brier,
            acp,
            rps: brier / 2.0,
            pseudo_r2: acp,
            n_matches: 9,
        };
        let rows = compare_reports(vec![
            report("bundesliga", "bp", 0.678, 0.40),
            report("bundesliga", "dp", 0.687, 0.39),
            report("bundesliga", "nb", 0.683, 0.40),
        ])
        .unwrap();
        assert!(rows[0].best_brier && !rows[1].best_brier && !rows[2].best_brier);
        // ACP tie flags both.
        assert!(rows[0].best_acp && !rows[1].best_acp && rows[2].best_acp);
    }

    #[test]
    fn datasource_parsing() {
        let d = DataSource::parse("data/d1_2425.csv:2024-2025");
        assert_eq!(d.season, "2024-2025");
        assert_eq!(d.path, PathBuf::from("data/d1_2425.csv"));
        let d = DataSource::parse("data/d1_2425.csv");
        assert_eq!(d.season, "d1_2425");
    }
}
