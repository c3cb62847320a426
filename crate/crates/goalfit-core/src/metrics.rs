//! Forecast evaluation: Brier score, average of correct probabilities,
//! ranked probability score, and pseudo-R².

use crate::math::{exp, ln};

/// Match outcomes ordered home win < draw < away win.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    HomeWin,
    Draw,
    AwayWin,
}

impl Outcome {
    pub fn from_goals(home: u32, away: u32) -> Outcome {
        use core::cmp::Ordering::*;
        match home.cmp(&away) {
            Greater => Outcome::HomeWin,
            Equal => Outcome::Draw,
            Less => Outcome::AwayWin,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Outcome::HomeWin => 0,
            Outcome::Draw => 1,
            Outcome::AwayWin => 2,
        }
    }
}

/// A three-way forecast paired with the realized outcome.
#[derive(Debug, Clone, Copy)]
pub struct OutcomeProbs {
    /// (home win, draw, away win); must sum to 1.
    pub p: [f64; 3],
    pub observed: Outcome,
}

impl OutcomeProbs {
    fn delta(&self, r: usize) -> f64 {
        if self.observed.index() == r {
            1.0
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyInput;

impl core::fmt::Display for EmptyInput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "metric computed over an empty forecast list")
    }
}

/// Mean squared error over the three outcome indicators; range [0, 2].
pub fn brier(items: &[OutcomeProbs]) -> Result<f64, EmptyInput> {
    if items.is_empty() {
        return Err(EmptyInput);
    }
    let total: f64 = items
        .iter()
        .map(|it| (0..3).map(|r| (it.p[r] - it.delta(r)) * (it.p[r] - it.delta(r))).sum::<f64>())
        .sum();
    Ok(total / items.len() as f64)
}

/// Arithmetic mean of the probabilities assigned to realized outcomes.
pub fn acp(items: &[OutcomeProbs]) -> Result<f64, EmptyInput> {
    if items.is_empty() {
        return Err(EmptyInput);
    }
    Ok(items.iter().map(|it| it.p[it.observed.index()]).sum::<f64>() / items.len() as f64)
}

/// Ranked probability score over the ordered outcomes; range [0, 1].
pub fn rps(items: &[OutcomeProbs]) -> Result<f64, EmptyInput> {
    if items.is_empty() {
        return Err(EmptyInput);
    }
    let total: f64 = items
        .iter()
        .map(|it| {
            let mut cp = 0.0;
            let mut cd = 0.0;
            let mut s = 0.0;
            for r in 0..2 {
                cp += it.p[r];
                cd += it.delta(r);
                s += (cp - cd) * (cp - cd);
            }
            s / 2.0
        })
        .sum();
    Ok(total / items.len() as f64)
}

/// Geometric mean of the probabilities assigned to realized outcomes,
/// accumulated in log space. Any zero probability yields exactly 0.
pub fn pseudo_r2(items: &[OutcomeProbs]) -> Result<f64, EmptyInput> {
    if items.is_empty() {
        return Err(EmptyInput);
    }
    let mut log_sum = 0.0;
    for it in items {
        let p = it.p[it.observed.index()];
        if p <= 0.0 {
            return Ok(0.0);
        }
        log_sum += ln(p);
    }
    Ok(exp(log_sum / items.len() as f64))
}

/// All four metrics over one forecast set.
#[derive(Debug, Clone, Copy)]
pub struct MetricReport {
    pub brier: f64,
    pub acp: f64,
    pub rps: f64,
    pub pseudo_r2: f64,
    pub n_matches: usize,
}

pub fn evaluate(items: &[OutcomeProbs]) -> Result<MetricReport, EmptyInput> {
    Ok(MetricReport {
        brier: brier(items)?,
        acp: acp(items)?,
        rps: rps(items)?,
        pseudo_r2: pseudo_r2(items)?,
        n_matches: items.len(),
    })
}
