//! Synthetic-league generation: a double round-robin schedule per period,
//! scores sampled from a chosen likelihood family, plus the ground-truth
//! parameters used to generate them.

use chrono::{Days, NaiveDate};
use goalfit_core::{Family, ScoringRates};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::data::MatchRecord;

/// Serde bridge for the core `Family` enum via its CLI code.
pub mod family_code {
    use goalfit_core::Family;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(family: &Family, s: S) -> Result<S::Ok, S::Error> {
        family.code().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Family, D::Error> {
        let code = String::deserialize(d)?;
        Family::from_code(&code)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown family `{code}`")))
    }
}

/// How abilities move between consecutive periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Evolution {
    /// Random walk with the given step sd.
    Walk { step_sd: f64 },
    /// Abilities frozen across periods.
    Identical,
    /// Abilities redrawn independently each period with the given sd.
    Independent { sd: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(with = "family_code")]
    pub family: Family,
    pub n_teams: usize,
    pub n_periods: usize,
    pub seed: u64,
    pub beta0: f64,
    pub home: f64,
    /// Sd of the first-period abilities.
    pub ability_sd: f64,
    pub evolution: Evolution,
    /// Covariance rate for BP/DIBP families.
    pub lambda3: f64,
    /// NB dispersion.
    pub gamma: f64,
    /// Mixture weight for DIBP/ZISM.
    pub omega: f64,
    /// Diagonal-bump rate for DIBP.
    pub xi: f64,
}

impl SimConfig {
    pub fn new(family: Family, n_teams: usize, n_periods: usize, seed: u64) -> SimConfig {
        SimConfig {
            family,
            n_teams,
            n_periods,
            seed,
            beta0: 0.1,
            home: 0.3,
            ability_sd: 0.3,
            evolution: Evolution::Walk { step_sd: 0.15 },
            lambda3: 0.1,
            gamma: 0.2,
            omega: 0.1,
            xi: 1.0,
        }
    }
}

/// Generating parameters, written alongside the synthetic CSV so recovery
/// tests can compare posterior intervals against them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Truth {
    pub config: SimConfig,
    /// `att[period][team]`, zero-sum within each period.
    pub att: Vec<Vec<f64>>,
    pub def: Vec<Vec<f64>>,
}

fn zero_center(values: &mut [f64]) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    for v in values.iter_mut() {
        *v -= mean;
    }
}

fn draw_abilities(cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let first = Normal::new(0.0, cfg.ability_sd).expect("positive sd");
    let mut periods: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_periods);
    let mut current: Vec<f64> = (0..cfg.n_teams).map(|_| first.sample(rng)).collect();
    zero_center(&mut current);
    periods.push(current.clone());
    for _ in 1..cfg.n_periods {
        match cfg.evolution {
            Evolution::Identical => {}
            Evolution::Walk { step_sd } => {
                let step = Normal::new(0.0, step_sd).expect("positive sd");
                for v in current.iter_mut() {
                    *v += step.sample(rng);
                }
                zero_center(&mut current);
            }
            Evolution::Independent { sd } => {
                let fresh = Normal::new(0.0, sd).expect("positive sd");
                current = (0..cfg.n_teams).map(|_| fresh.sample(rng)).collect();
                zero_center(&mut current);
            }
        }
        periods.push(current.clone());
    }
    periods
}

fn poisson(rng: &mut ChaCha8Rng, rate: f64) -> u32 {
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("positive rate").sample(rng) as u32
}

/// Sample one score from the family's generative model.
fn sample_score(cfg: &SimConfig, rng: &mut ChaCha8Rng, rates: &ScoringRates) -> (u32, u32) {
    match cfg.family {
        Family::DoublePoisson => {
            (poisson(rng, rates.lambda1), poisson(rng, rates.lambda2))
        }
        Family::BivariatePoisson => {
            let shared = poisson(rng, rates.lambda3);
            (poisson(rng, rates.lambda1) + shared, poisson(rng, rates.lambda2) + shared)
        }
        Family::DiagInflBivPoisson => {
            if rng.random::<f64>() < cfg.omega {
                let d = poisson(rng, cfg.xi);
                (d, d)
            } else {
                let shared = poisson(rng, rates.lambda3);
                (
                    poisson(rng, rates.lambda1) + shared,
                    poisson(rng, rates.lambda2) + shared,
                )
            }
        }
        Family::NegBinomial => {
            // Gamma-Poisson mixture with unit-mean Gamma(1/gamma, gamma).
            let mix = Gamma::new(1.0 / cfg.gamma, cfg.gamma).expect("positive shape");
            let gx = mix.sample(rng);
            let gy = mix.sample(rng);
            (poisson(rng, rates.lambda1 * gx), poisson(rng, rates.lambda2 * gy))
        }
        Family::Skellam => (poisson(rng, rates.lambda1), poisson(rng, rates.lambda2)),
        Family::ZeroInflSkellam => {
            if rng.random::<f64>() < cfg.omega {
                (0, 0)
            } else {
                (poisson(rng, rates.lambda1), poisson(rng, rates.lambda2))
            }
        }
    }
}

/// Circle-method double round-robin pairings for one period:
/// `2 * (n - 1)` rounds of `n / 2` matches.
fn schedule(n_teams: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n_teams >= 2 && n_teams % 2 == 0, "need an even team count");
    let rounds = 2 * (n_teams - 1);
    let mut ring: Vec<usize> = (1..n_teams).collect();
    let mut out = Vec::with_capacity(rounds);
    for r in 0..rounds {
        let mut pairs = vec![(0usize, ring[0])];
        for k in 1..n_teams / 2 {
            pairs.push((ring[k], ring[n_teams - 1 - k]));
        }
        // Second leg swaps venues.
        if r >= rounds / 2 {
            pairs = pairs.into_iter().map(|(h, a)| (a, h)).collect();
        }
        out.push(pairs);
        ring.rotate_right(1);
    }
    out
}

pub fn team_name(i: usize) -> String {
    format!("T{i:02}")
}

/// Generate the synthetic league. Periods are packed two per synthetic
/// season so the half-season periodization reconstructs them exactly.
pub fn simulate(cfg: &SimConfig) -> (Vec<MatchRecord>, Truth) {
    assert!(cfg.n_periods >= 1);
    assert!(
        cfg.n_periods % 2 == 0 || cfg.n_periods == 1,
        "periods map onto season halves; use 1 or an even count"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let att = draw_abilities(cfg, &mut rng);
    let def = draw_abilities(cfg, &mut rng);
    let rounds = schedule(cfg.n_teams);
    let start = NaiveDate::from_ymd_opt(2020, 8, 1).unwrap();

    let mut records = Vec::new();
    let mut day = 0u64;
    let mut global_round = 0u32;
    for period in 0..cfg.n_periods {
        let season_idx = period / 2;
        let season = format!("S{:02}", season_idx + 1);
        // Round numbering restarts per season (two periods per season).
        if period % 2 == 0 {
            global_round = 0;
        }
        for pairs in &rounds {
            global_round += 1;
            day += 1;
            let date = start + Days::new(day * 2);
            for &(h, a) in pairs {
                let log_l1 = cfg.beta0 + cfg.home + att[period][h] + def[period][a];
                let log_l2 = cfg.beta0 + att[period][a] + def[period][h];
                let rates = ScoringRates {
                    lambda1: log_l1.exp(),
                    lambda2: log_l2.exp(),
                    lambda3: if cfg.family.has_covariance() { cfg.lambda3 } else { 0.0 },
                };
                let (hg, ag) = sample_score(cfg, &mut rng, &rates);
                records.push(MatchRecord {
                    date,
                    home_team: team_name(h),
                    away_team: team_name(a),
                    home_goals: hg,
                    away_goals: ag,
                    season: season.clone(),
                    round: Some(global_round),
                });
            }
        }
    }
    (records, Truth { config: cfg.clone(), att, def })
}

/// Serialize records in the ingestion CSV dialect (with explicit rounds).
pub fn write_csv<W: std::io::Write>(
    records: &[MatchRecord],
    writer: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["Date", "HomeTeam", "AwayTeam", "FTHG", "FTAG", "Round"])?;
    for m in records {
        w.write_record([
            m.date.format("%d/%m/%Y").to_string(),
            m.home_team.clone(),
            m.away_team.clone(),
            m.home_goals.to_string(),
            m.away_goals.to_string(),
            m.round.map_or_else(String::new, |r| r.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
