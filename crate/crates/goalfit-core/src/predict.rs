//! Posterior-predictive forecasting and ability-trajectory summaries.
//!
//! Outcome probabilities are computed by averaging the family pmf over
//! posterior draws on a score (or score-difference) grid, rather than by
//! simulating scores per draw: deterministic given the draws, and lower
//! Monte Carlo variance.

use alloc::vec;
use alloc::vec::Vec;

use crate::likelihoods::log_pmf;
use crate::math::{exp, quantile_sorted};
use crate::posterior::fixture_rates;
use crate::sampler::PosteriorDraws;
use crate::space::ParameterSpace;

/// A match to forecast, by registry index and 0-based period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub home: usize,
    pub away: usize,
    pub period: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictError {
    UnknownTeam { index: usize },
    PeriodOutOfRange { period: usize },
    NoDraws,
}

impl core::fmt::Display for PredictError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PredictError::UnknownTeam { index } => write!(f, "unknown team index {index}"),
            PredictError::PeriodOutOfRange { period } => {
                write!(f, "period {period} outside the fitted range")
            }
            PredictError::NoDraws => write!(f, "no posterior draws available"),
        }
    }
}

/// Draw-averaged predictive distribution on the retained grid.
#[derive(Debug, Clone)]
pub enum ScoreDist {
    /// Joint score pmf for count families: `(k+1) x (k+1)` row-major,
    /// home goals indexing rows.
    Grid { k: usize, probs: Vec<f64> },
    /// Goal-difference pmf for Skellam families over `-k ..= k`.
    Difference { k: usize, probs: Vec<f64> },
}

impl ScoreDist {
    pub fn total(&self) -> f64 {
        match self {
            ScoreDist::Grid { probs, .. } | ScoreDist::Difference { probs, .. } => {
                probs.iter().sum()
            }
        }
    }
}

/// Per-fixture outcome probabilities plus the underlying grid.
#[derive(Debug, Clone)]
pub struct Forecast {
    pub fixture: Fixture,
    pub p_home: f64,
    pub p_draw: f64,
    pub p_away: f64,
    /// Predictive mass beyond the retained grid, below 1e-6 by construction.
    pub tail_mass: f64,
    pub dist: ScoreDist,
}

pub struct ForecastSet {
    pub forecasts: Vec<Forecast>,
}

/// Default score-grid bound; doubled until the tail mass is negligible.
const GRID_K: usize = 15;
const TAIL_TOL: f64 = 1e-6;
const MAX_K: usize = 960;

fn check_fixture(space: &ParameterSpace, fx: &Fixture) -> Result<(), PredictError> {
    let spec = space.spec();
    if fx.home >= spec.n_teams {
        return Err(PredictError::UnknownTeam { index: fx.home });
    }
    if fx.away >= spec.n_teams {
        return Err(PredictError::UnknownTeam { index: fx.away });
    }
    if fx.period >= spec.n_periods {
        return Err(PredictError::PeriodOutOfRange { period: fx.period });
    }
    Ok(())
}

fn forecast_one(
    space: &ParameterSpace,
    draws: &PosteriorDraws,
    fx: Fixture,
) -> Result<Forecast, PredictError> {
    check_fixture(space, &fx)?;
    let family = space.spec().family;
    let n = draws.n_total();
    if n == 0 {
        return Err(PredictError::NoDraws);
    }

    // Cache the per-draw rates once; the grid may be recomputed at larger K.
    let mut per_draw = Vec::with_capacity(n);
    for theta in draws.iter_draws() {
        let view = space
            .constrain(theta)
            .expect("sampler draws are valid points of their own space");
        per_draw.push(fixture_rates(&view, family, fx.home, fx.away, fx.period));
    }
    let weight = 1.0 / n as f64;

    let mut k = GRID_K;
    loop {
        let dist = if family.is_difference_model() {
            let mut probs = vec![0.0; 2 * k + 1];
            for (rates, params) in &per_draw {
                for (cell, z) in probs.iter_mut().zip(-(k as i64)..) {
                    // The difference-model pmf depends on x - y only.
                    let (x, y) = if z >= 0 { (z as u32, 0) } else { (0, (-z) as u32) };
                    *cell += weight * exp(log_pmf(params, x, y, rates));
                }
            }
            ScoreDist::Difference { k, probs }
        } else {
            let side = k + 1;
            let mut probs = vec![0.0; side * side];
            for (rates, params) in &per_draw {
                for x in 0..side {
                    for y in 0..side {
                        probs[x * side + y] +=
                            weight * exp(log_pmf(params, x as u32, y as u32, rates));
                    }
                }
            }
            ScoreDist::Grid { k, probs }
        };

        let total = dist.total();
        let tail = 1.0 - total;
        if tail <= TAIL_TOL || k >= MAX_K {
            let (mut home, mut draw, mut away) = (0.0, 0.0, 0.0);
            match &dist {
                ScoreDist::Grid { k, probs } => {
                    let side = k + 1;
                    for x in 0..side {
                        for y in 0..side {
                            let p = probs[x * side + y];
                            match x.cmp(&y) {
                                core::cmp::Ordering::Greater => home += p,
                                core::cmp::Ordering::Equal => draw += p,
                                core::cmp::Ordering::Less => away += p,
                            }
                        }
                    }
                }
                ScoreDist::Difference { k, probs } => {
                    for (i, &p) in probs.iter().enumerate() {
                        let z = i as i64 - *k as i64;
                        match z.cmp(&0) {
                            core::cmp::Ordering::Greater => home += p,
                            core::cmp::Ordering::Equal => draw += p,
                            core::cmp::Ordering::Less => away += p,
                        }
                    }
                }
            }
            return Ok(Forecast {
                fixture: fx,
                p_home: home / total,
                p_draw: draw / total,
                p_away: away / total,
                tail_mass: tail.max(0.0),
                dist,
            });
        }
        k *= 2;
    }
}

/// Rao-Blackwellized forecasts for a batch of fixtures.
pub fn forecast(
    space: &ParameterSpace,
    draws: &PosteriorDraws,
    fixtures: &[Fixture],
) -> Result<ForecastSet, PredictError> {
    let forecasts = fixtures
        .iter()
        .map(|&fx| forecast_one(space, draws, fx))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForecastSet { forecasts })
}

/// Which ability an [`AbilitySummary`] row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbilityKind {
    Attack,
    Defense,
}

/// Posterior summaries of one team-period ability: mean plus 50% and 95%
/// central credible intervals (type-7 empirical quantiles).
#[derive(Debug, Clone, Copy)]
pub struct AbilitySummary {
    pub team: usize,
    pub period: usize,
    pub kind: AbilityKind,
    pub mean: f64,
    pub q025: f64,
    pub q25: f64,
    pub q75: f64,
    pub q975: f64,
}

fn summarize_series(values: &mut [f64]) -> (f64, f64, f64, f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.sort_unstable_by(f64::total_cmp);
    (
        mean,
        quantile_sorted(values, 0.025),
        quantile_sorted(values, 0.25),
        quantile_sorted(values, 0.75),
        quantile_sorted(values, 0.975),
    )
}

/// Quantile summaries of every constrained attack/defense trajectory.
pub fn summarize_abilities(
    space: &ParameterSpace,
    draws: &PosteriorDraws,
) -> Result<Vec<AbilitySummary>, PredictError> {
    let n = draws.n_total();
    if n == 0 {
        return Err(PredictError::NoDraws);
    }
    let spec = space.spec();
    let views: Vec<_> = draws
        .iter_draws()
        .map(|theta| {
            space
                .constrain(theta)
                .expect("sampler draws are valid points of their own space")
        })
        .collect();

    let mut out = Vec::with_capacity(2 * spec.n_teams * spec.n_periods);
    let mut buf = vec![0.0; n];
    for kind in [AbilityKind::Attack, AbilityKind::Defense] {
        for team in 0..spec.n_teams {
            for period in 0..spec.n_periods {
                for (slot, view) in buf.iter_mut().zip(&views) {
                    *slot = match kind {
                        AbilityKind::Attack => view.att(team, period),
                        AbilityKind::Defense => view.def(team, period),
                    };
                }
                let (mean, q025, q25, q75, q975) = summarize_series(&mut buf);
                out.push(AbilitySummary { team, period, kind, mean, q025, q25, q75, q975 });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::likelihoods::Family;
    use crate::sampler::{ChainOutput, ChainStats, PosteriorDraws};
    use crate::space::{Dynamics, HyperParams, ModelSpec, ParameterSpace};

    fn make_space(family: Family) -> ParameterSpace {
        let spec = ModelSpec {
            family,
            dynamics: Dynamics::Static,
            n_teams: 4,
            n_periods: 1,
            hyper: HyperParams::default(),
        };
        ParameterSpace::build(spec).unwrap()
    }

    fn draws_from(space: &ParameterSpace, points: &[Vec<f64>]) -> PosteriorDraws {
        let dim = space.dim();
        let mut flat = Vec::new();
        for p in points {
            assert_eq!(p.len(), dim);
            flat.extend_from_slice(p);
        }
        PosteriorDraws::from_chains(
            dim,
            points.len(),
            vec![ChainOutput {
                draws: flat,
                stats: ChainStats { divergences: 0, step_size: 0.1, mean_accept: 0.9 },
            }],
        )
    }

    #[test]
    fn unit_rate_double_poisson_draw_probability() {
        // With beta0 = 0, home = 0, and all abilities zero, both rates are 1.
        let space = make_space(Family::DoublePoisson);
        let draws = draws_from(&space, &[vec![0.0; space.dim()]]);
        let fx = Fixture { home: 0, away: 1, period: 0 };
        let set = forecast(&space, &draws, &[fx]).unwrap();
        let f = &set.forecasts[0];
        // p_draw = sum_k Pois(k;1)^2 = e^{-2} I_0(2)
        let expected = (-2.0f64).exp() * crate::likelihoods::log_bessel_i(0, 2.0).exp();
        assert!((f.p_draw - expected).abs() < 1e-9, "p_draw {}", f.p_draw);
        assert!((f.p_home + f.p_draw + f.p_away - 1.0).abs() < 1e-9);
        assert!((f.p_home - f.p_away).abs() < 1e-9, "symmetric fixture");
        assert!(f.tail_mass < 1e-6);
    }

    #[test]
    fn grid_mass_accounts_for_tail() {
        let space = make_space(Family::BivariatePoisson);
        // Nonzero rates via beta0 = 0.6 to exercise the guard.
        let mut theta = vec![0.0; space.dim()];
        theta[0] = 0.6;
        let draws = draws_from(&space, &[theta]);
        let set =
            forecast(&space, &draws, &[Fixture { home: 2, away: 3, period: 0 }]).unwrap();
        let f = &set.forecasts[0];
        assert!((f.dist.total() + f.tail_mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn difference_family_uses_sign_regions() {
        let space = make_space(Family::Skellam);
        let mut theta = vec![0.0; space.dim()];
        theta[0] = 0.3; // lambda1 = lambda2 = e^{0.3} with zero abilities and home 0... home effect
        theta[1] = 0.0;
        let draws = draws_from(&space, &[theta]);
        let set =
            forecast(&space, &draws, &[Fixture { home: 0, away: 1, period: 0 }]).unwrap();
        let f = &set.forecasts[0];
        assert!(matches!(f.dist, ScoreDist::Difference { .. }));
        assert!((f.p_home + f.p_draw + f.p_away - 1.0).abs() < 1e-9);
        assert!((f.p_home - f.p_away).abs() < 1e-12, "symmetric rates");
    }

    #[test]
    fn degenerate_draws_match_single_draw() {
        let space = make_space(Family::NegBinomial);
        let mut theta = vec![0.0; space.dim()];
        theta[0] = 0.2;
        let single = draws_from(&space, &[theta.clone()]);
        let repeated = draws_from(&space, &vec![theta; 7]);
        let fx = Fixture { home: 1, away: 2, period: 0 };
        let a = &forecast(&space, &single, &[fx]).unwrap().forecasts[0];
        let b = &forecast(&space, &repeated, &[fx]).unwrap().forecasts[0];
        assert!((a.p_home - b.p_home).abs() < 1e-12);
        assert!((a.p_draw - b.p_draw).abs() < 1e-12);
        assert!((a.p_away - b.p_away).abs() < 1e-12);
    }

    #[test]
    fn fixture_validation() {
        let space = make_space(Family::DoublePoisson);
        let draws = draws_from(&space, &[vec![0.0; space.dim()]]);
        let err = forecast(&space, &draws, &[Fixture { home: 9, away: 1, period: 0 }])
            .err()
            .unwrap();
        assert_eq!(err, PredictError::UnknownTeam { index: 9 });
        let err = forecast(&space, &draws, &[Fixture { home: 0, away: 1, period: 5 }])
            .err()
            .unwrap();
        assert_eq!(err, PredictError::PeriodOutOfRange { period: 5 });
    }

    #[test]
    fn ability_summaries_are_exact_for_constant_draws() {
        let space = make_space(Family::DoublePoisson);
        let mut theta = vec![0.0; space.dim()];
        // One free attack coordinate nonzero.
        theta[2] = 0.9;
        let draws = draws_from(&space, &vec![theta.clone(); 5]);
        let view = space.constrain(&theta).unwrap();
        let rows = summarize_abilities(&space, &draws).unwrap();
        assert_eq!(rows.len(), 2 * 4);
        for r in &rows {
            let v = match r.kind {
                AbilityKind::Attack => view.att(r.team, r.period),
                AbilityKind::Defense => view.def(r.team, r.period),
            };
            assert!((r.mean - v).abs() < 1e-12);
            assert_eq!(r.q025, r.q975);
            assert!(r.q025 <= r.q25 && r.q25 <= r.q75 && r.q75 <= r.q975);
        }
        // Zero-sum propagates through averaging.
        let att_sum: f64 = rows
            .iter()
            .filter(|r| r.kind == AbilityKind::Attack)
            .map(|r| r.mean)
            .sum();
        assert!(att_sum.abs() < 1e-9);
    }
}
