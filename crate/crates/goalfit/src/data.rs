//! Match-result ingestion: CSV parsing, round inference, periodization,
//! and train/holdout splits for the forecast scenarios.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::NaiveDate;
use goalfit_core::TrainingMatch;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("required column `{0}` missing from header")]
    MissingColumn(&'static str),
    #[error("row {line}: {reason}")]
    BadRow { line: u64, reason: String },
    #[error("season `{season}` has an odd number of teams ({n})")]
    OddTeamCount { season: String, n: usize },
    #[error("scenario cutoff {cutoff} leaves no holdout matches (max round {max_round})")]
    EmptyHoldout { cutoff: u32, max_round: u32 },
    #[error("dataset is empty")]
    Empty,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One match result, as read from a results CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub date: NaiveDate,
    pub home_team: String,
    pub away_team: String,
    pub home_goals: u32,
    pub away_goals: u32,
    pub season: String,
    /// 1-based round within the season; inferred from dates when the CSV
    /// has no explicit column.
    pub round: Option<u32>,
}

/// Deterministic team index: lexicographic over every team seen anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TeamRegistry {
    names: Vec<String>,
}

impl TeamRegistry {
    pub fn from_matches(matches: &[MatchRecord]) -> TeamRegistry {
        let set: BTreeSet<&str> = matches
            .iter()
            .flat_map(|m| [m.home_team.as_str(), m.away_team.as_str()])
            .collect();
        TeamRegistry { names: set.into_iter().map(String::from).collect() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// A dataset with rounds grouped into fitting periods (season halves).
#[derive(Debug, Clone)]
pub struct PeriodizedDataset {
    pub matches: Vec<MatchRecord>,
    pub registry: TeamRegistry,
    /// Per match, 1-based period index; aligned with `matches`.
    pub period_of_match: Vec<u32>,
    pub n_periods: u32,
}

/// Which tail of the latest season is held out for forecasting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    SecondHalf,
    LastThreeRounds,
    LastRound,
    Cutoff(u32),
}

impl Scenario {
    pub fn parse(text: &str) -> Option<Scenario> {
        match text {
            "second-half" => Some(Scenario::SecondHalf),
            "last3" => Some(Scenario::LastThreeRounds),
            "last1" => Some(Scenario::LastRound),
            other => other
                .strip_prefix("cutoff=")
                .and_then(|v| v.parse().ok())
                .map(Scenario::Cutoff),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Scenario::SecondHalf => "second-half".into(),
            Scenario::LastThreeRounds => "last3".into(),
            Scenario::LastRound => "last1".into(),
            Scenario::Cutoff(r) => format!("cutoff={r}"),
        }
    }
}

/// Train/holdout partition for one scenario.
#[derive(Debug, Clone)]
pub struct FitSplit {
    pub train: PeriodizedDataset,
    /// Holdout matches with their 1-based period labels.
    pub holdout: Vec<(MatchRecord, u32)>,
    pub scenario: Scenario,
}

/// Parse a football results CSV. Requires header columns
/// `Date,HomeTeam,AwayTeam,FTHG,FTAG`; an optional `Round` column is kept.
pub fn parse_matches<R: Read>(source: R, season: &str) -> Result<Vec<MatchRecord>, DataError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let headers = reader.headers()?.clone();
    let col = |name: &'static str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or(DataError::MissingColumn(name))
    };
    let c_date = col("Date")?;
    let c_home = col("HomeTeam")?;
    let c_away = col("AwayTeam")?;
    let c_hg = col("FTHG")?;
    let c_ag = col("FTAG")?;
    let c_round = headers.iter().position(|h| h.trim() == "Round");

    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        // football-data.co.uk files often end with blank padding rows.
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let field = |idx: usize| record.get(idx).unwrap_or("").trim();
        let bad = |reason: String| DataError::BadRow { line, reason };

        let date = parse_date(field(c_date))
            .ok_or_else(|| bad(format!("unparseable date `{}`", field(c_date))))?;
        let home_team = field(c_home).to_string();
        let away_team = field(c_away).to_string();
        if home_team.is_empty() || away_team.is_empty() {
            return Err(bad("missing team name".into()));
        }
        if home_team == away_team {
            return Err(bad(format!("team `{home_team}` plays itself")));
        }
        let goals = |idx: usize, label: &str| -> Result<u32, DataError> {
            field(idx)
                .parse()
                .map_err(|_| bad(format!("unparseable {label} goals `{}`", field(idx))))
        };
        let round = match c_round {
            Some(idx) if !field(idx).is_empty() => Some(
                field(idx)
                    .parse()
                    .map_err(|_| bad(format!("unparseable round `{}`", field(idx))))?,
            ),
            _ => None,
        };
        out.push(MatchRecord {
            date,
            home_goals: goals(c_hg, "home")?,
            away_goals: goals(c_ag, "away")?,
            home_team,
            away_team,
            season: season.to_string(),
            round,
        });
    }
    Ok(out)
}

fn parse_date(text: &str) -> Option<NaiveDate> {
    // `%Y` happily parses two-digit years as year 25 AD, so pick the
    // format from the width of the year field.
    let fmt = match text.rsplit('/').next().map(str::len) {
        Some(2) => "%d/%m/%y",
        _ => "%d/%m/%Y",
    };
    NaiveDate::parse_from_str(text, fmt).ok()
}

/// Total order making periodization independent of input row order.
fn match_sort_key(m: &MatchRecord) -> (NaiveDate, &str, &str) {
    (m.date, m.home_team.as_str(), m.away_team.as_str())
}

/// Infer 1-based rounds per season from chronological order. An explicit
/// round column wins over inference.
pub fn assign_rounds(matches: Vec<MatchRecord>) -> Result<Vec<MatchRecord>, DataError> {
    let mut by_season: BTreeMap<String, Vec<MatchRecord>> = BTreeMap::new();
    for m in matches {
        by_season.entry(m.season.clone()).or_default().push(m);
    }
    let mut out = Vec::new();
    for (season, mut group) in by_season {
        let teams: BTreeSet<&str> = group
            .iter()
            .flat_map(|m| [m.home_team.as_str(), m.away_team.as_str()])
            .collect();
        let n = teams.len();
        if n % 2 != 0 {
            return Err(DataError::OddTeamCount { season, n });
        }
        let per_round = n / 2;
        group.sort_by(|a, b| match_sort_key(a).cmp(&match_sort_key(b)));
        for (k, m) in group.iter_mut().enumerate() {
            if m.round.is_none() {
                m.round = Some(1 + (k / per_round) as u32);
            }
        }
        out.extend(group);
    }
    Ok(out)
}

/// Season ordering for period numbering: chronological by first match.
fn season_order(matches: &[MatchRecord]) -> Vec<String> {
    let mut first: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for m in matches {
        first
            .entry(&m.season)
            .and_modify(|d| *d = (*d).min(m.date))
            .or_insert(m.date);
    }
    let mut seasons: Vec<(&str, NaiveDate)> = first.into_iter().collect();
    seasons.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
    seasons.into_iter().map(|(s, _)| s.to_string()).collect()
}

/// Group rounds into half-season periods, numbered chronologically across
/// seasons: rounds 1..=ceil(R/2) form the first half of each season.
pub fn periodize(matches: Vec<MatchRecord>) -> Result<PeriodizedDataset, DataError> {
    let mut matches = assign_rounds(matches)?;
    if matches.is_empty() {
        return Err(DataError::Empty);
    }
    matches.sort_by(|a, b| match_sort_key(a).cmp(&match_sort_key(b)));
    let registry = TeamRegistry::from_matches(&matches);
    let seasons = season_order(&matches);

    let mut max_round: BTreeMap<&str, u32> = BTreeMap::new();
    for m in &matches {
        let r = m.round.expect("rounds assigned above");
        max_round
            .entry(&m.season)
            .and_modify(|v| *v = (*v).max(r))
            .or_insert(r);
    }
    let half: BTreeMap<String, u32> =
        max_round.iter().map(|(s, &r)| (s.to_string(), r.div_ceil(2))).collect();
    let season_pos: BTreeMap<&str, u32> = seasons
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i as u32))
        .collect();

    let period_of_match: Vec<u32> = matches
        .iter()
        .map(|m| {
            let base = 2 * season_pos[m.season.as_str()];
            let second = u32::from(m.round.unwrap() > half[&m.season]);
            base + 1 + second
        })
        .collect();
    let n_periods = 2 * seasons.len() as u32;
    Ok(PeriodizedDataset { matches, registry, period_of_match, n_periods })
}

/// Partition the most recent season's tail into a holdout set.
pub fn split_for_scenario(
    dataset: &PeriodizedDataset,
    scenario: Scenario,
) -> Result<FitSplit, DataError> {
    let seasons = season_order(&dataset.matches);
    let last_season = seasons.last().ok_or(DataError::Empty)?.clone();
    let max_round = dataset
        .matches
        .iter()
        .filter(|m| m.season == last_season)
        .filter_map(|m| m.round)
        .max()
        .ok_or(DataError::Empty)?;
    let cutoff = match scenario {
        Scenario::SecondHalf => max_round / 2,
        Scenario::LastThreeRounds => max_round.saturating_sub(3),
        Scenario::LastRound => max_round - 1,
        Scenario::Cutoff(r) => r,
    };
    if cutoff >= max_round {
        return Err(DataError::EmptyHoldout { cutoff, max_round });
    }

    let mut train_matches = Vec::new();
    let mut train_periods = Vec::new();
    let mut holdout = Vec::new();
    for (m, &p) in dataset.matches.iter().zip(&dataset.period_of_match) {
        if m.season == last_season && m.round.unwrap() > cutoff {
            holdout.push((m.clone(), p));
        } else {
            train_matches.push(m.clone());
            train_periods.push(p);
        }
    }
    // The parameter space keeps every period (and the full registry) so
    // holdout periods exist even with zero training matches in them.
    let train = PeriodizedDataset {
        matches: train_matches,
        registry: dataset.registry.clone(),
        period_of_match: train_periods,
        n_periods: dataset.n_periods,
    };
    Ok(FitSplit { train, holdout, scenario })
}

/// Convert a periodized dataset to the core crate's fitting rows.
pub fn training_rows(dataset: &PeriodizedDataset) -> Vec<TrainingMatch> {
    dataset
        .matches
        .iter()
        .zip(&dataset.period_of_match)
        .map(|(m, &p)| TrainingMatch {
            home: dataset.registry.index(&m.home_team).expect("registry covers all teams"),
            away: dataset.registry.index(&m.away_team).expect("registry covers all teams"),
            home_goals: m.home_goals,
            away_goals: m.away_goals,
            period: (p - 1) as usize,
        })
        .collect()
}
