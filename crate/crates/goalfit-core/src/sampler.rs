//! No-U-turn Hamiltonian Monte Carlo with dual-averaging step-size
//! adaptation and windowed diagonal mass-matrix estimation.
//!
//! Chains are seeded independently from the run seed, so sequential and
//! parallel execution produce identical draws.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::{exp, ln, sqrt};
use crate::posterior::LogDensity;

#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    pub n_chains: usize,
    pub n_warmup: usize,
    pub n_samples: usize,
    pub target_accept: f64,
    pub max_tree_depth: usize,
    pub seed: u64,
    /// Sd of the N(0, jitter^2) initialization on the unconstrained scale.
    pub init_jitter: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            n_chains: 4,
            n_warmup: 1000,
            n_samples: 1000,
            target_accept: 0.8,
            max_tree_depth: 10,
            seed: 0,
            init_jitter: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerError {
    /// No finite-density initialization point found in 100 attempts.
    NonFiniteInit { chain: usize },
    /// A chain spent more than half of its sampling iterations diverging.
    AllChainsDiverged { chain: usize, rate: f64 },
    BadConfig(&'static str),
}

impl core::fmt::Display for SamplerError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SamplerError::NonFiniteInit { chain } => {
                write!(f, "chain {chain}: no finite initialization in 100 attempts")
            }
            SamplerError::AllChainsDiverged { chain, rate } => {
                write!(f, "chain {chain}: divergence rate {rate:.2} exceeds 0.5")
            }
            SamplerError::BadConfig(m) => write!(f, "bad sampler config: {m}"),
        }
    }
}

/// Progress callback payload.
#[derive(Debug, Clone, Copy)]
pub enum Progress {
    Warmup { chain: usize, iter: usize, total: usize },
    Sampling { chain: usize, iter: usize, total: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct ChainStats {
    pub divergences: usize,
    pub step_size: f64,
    pub mean_accept: f64,
}

/// Output of one chain: `n_samples x dim` draws, row-major.
pub struct ChainOutput {
    pub draws: Vec<f64>,
    pub stats: ChainStats,
}

/// Post-warmup unconstrained draws for all chains.
pub struct PosteriorDraws {
    pub dim: usize,
    pub n_chains: usize,
    pub n_samples: usize,
    draws: Vec<f64>, // [chain][iter][dim]
    pub stats: Vec<ChainStats>,
}

impl PosteriorDraws {
    pub fn from_chains(dim: usize, n_samples: usize, chains: Vec<ChainOutput>) -> PosteriorDraws {
        let n_chains = chains.len();
        let mut draws = Vec::with_capacity(n_chains * n_samples * dim);
        let mut stats = Vec::with_capacity(n_chains);
        for c in chains {
            debug_assert_eq!(c.draws.len(), n_samples * dim);
            draws.extend_from_slice(&c.draws);
            stats.push(c.stats);
        }
        PosteriorDraws { dim, n_chains, n_samples, draws, stats }
    }

    #[inline]
    pub fn draw(&self, chain: usize, iter: usize) -> &[f64] {
        let start = (chain * self.n_samples + iter) * self.dim;
        &self.draws[start..start + self.dim]
    }

    pub fn iter_draws(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.chunks_exact(self.dim)
    }

    pub fn n_total(&self) -> usize {
        self.n_chains * self.n_samples
    }

    pub fn total_divergences(&self) -> usize {
        self.stats.iter().map(|s| s.divergences).sum()
    }

    /// Per-chain series of one coordinate, for diagnostics.
    pub fn coordinate_chains(&self, coord: usize) -> Vec<Vec<f64>> {
        (0..self.n_chains)
            .map(|c| (0..self.n_samples).map(|i| self.draw(c, i)[coord]).collect())
            .collect()
    }
}

// ---- RNG helpers -----------------------------------------------------------

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Marsaglia polar method.
    loop {
        let u = 2.0 * uniform(rng) - 1.0;
        let v = 2.0 * uniform(rng) - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * sqrt(-2.0 * ln(s) / s);
        }
    }
}

fn exponential(rng: &mut ChaCha8Rng) -> f64 {
    -ln(1.0 - uniform(rng))
}

/// SplitMix64-style per-chain seed derivation.
fn chain_seed(seed: u64, chain: usize) -> u64 {
    let mut z = seed ^ (chain as u64 + 1).wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

// ---- Hamiltonian dynamics --------------------------------------------------

/// Position/momentum pair with cached density and gradient.
#[derive(Clone)]
struct State {
    q: Vec<f64>,
    p: Vec<f64>,
    grad: Vec<f64>,
    lp: f64,
}

impl State {
    fn joint(&self, inv_mass: &[f64]) -> f64 {
        let kinetic: f64 =
            self.p.iter().zip(inv_mass).map(|(&p, &im)| 0.5 * p * p * im).sum();
        self.lp - kinetic
    }
}

/// One leapfrog step of size `eps * dir`.
fn leapfrog(target: &dyn LogDensity, state: &mut State, eps: f64, dir: f64, inv_mass: &[f64]) {
    let h = eps * dir;
    for (p, g) in state.p.iter_mut().zip(&state.grad) {
        *p += 0.5 * h * g;
    }
    for ((q, p), im) in state.q.iter_mut().zip(&state.p).zip(inv_mass) {
        *q += h * p * im;
    }
    state.lp = target.log_density_grad(&state.q, &mut state.grad);
    for (p, g) in state.p.iter_mut().zip(&state.grad) {
        *p += 0.5 * h * g;
    }
}

/// Energy-error threshold marking a divergent transition, in nats.
const DIVERGENCE_LIMIT: f64 = 1000.0;

struct TreeResult {
    minus: State,
    plus: State,
    proposal: Vec<f64>,
    n_valid: f64,
    keep_going: bool,
    diverged: bool,
    accept_sum: f64,
    n_accept: f64,
}

fn no_uturn(minus: &State, plus: &State, inv_mass: &[f64]) -> bool {
    let mut dot_minus = 0.0;
    let mut dot_plus = 0.0;
    for i in 0..minus.q.len() {
        let dq = plus.q[i] - minus.q[i];
        dot_minus += dq * minus.p[i] * inv_mass[i];
        dot_plus += dq * plus.p[i] * inv_mass[i];
    }
    dot_minus >= 0.0 && dot_plus >= 0.0
}

#[allow(clippy::too_many_arguments)]
fn build_tree(
    target: &dyn LogDensity,
    rng: &mut ChaCha8Rng,
    from: &State,
    log_u: f64,
    dir: f64,
    depth: usize,
    eps: f64,
    joint0: f64,
    inv_mass: &[f64],
) -> TreeResult {
    if depth == 0 {
        let mut leaf = from.clone();
        leapfrog(target, &mut leaf, eps, dir, inv_mass);
        let joint = leaf.joint(inv_mass);
        let delta = joint - joint0;
        let diverged = !(delta > -DIVERGENCE_LIMIT);
        let n_valid = if log_u <= joint { 1.0 } else { 0.0 };
        let accept = exp(delta.min(0.0));
        return TreeResult {
            proposal: leaf.q.clone(),
            minus: leaf.clone(),
            plus: leaf,
            n_valid,
            keep_going: !diverged,
            diverged,
            accept_sum: accept,
            n_accept: 1.0,
        };
    }
    let inner =
        build_tree(target, rng, from, log_u, dir, depth - 1, eps, joint0, inv_mass);
    if !inner.keep_going {
        return inner;
    }
    let outer_from = if dir < 0.0 { &inner.minus } else { &inner.plus };
    let outer =
        build_tree(target, rng, outer_from, log_u, dir, depth - 1, eps, joint0, inv_mass);
    let (minus, plus) =
        if dir < 0.0 { (outer.minus, inner.plus) } else { (inner.minus, outer.plus) };
    let n_total = inner.n_valid + outer.n_valid;
    let proposal = if n_total > 0.0 && uniform(rng) < outer.n_valid / n_total {
        outer.proposal
    } else {
        inner.proposal
    };
    let keep_going = outer.keep_going && no_uturn(&minus, &plus, inv_mass);
    TreeResult {
        minus,
        plus,
        proposal,
        n_valid: n_total,
        keep_going,
        diverged: inner.diverged || outer.diverged,
        accept_sum: inner.accept_sum + outer.accept_sum,
        n_accept: inner.n_accept + outer.n_accept,
    }
}

/// One NUTS transition; returns (new state, accept stat, diverged flag).
fn nuts_transition(
    target: &dyn LogDensity,
    rng: &mut ChaCha8Rng,
    current: State,
    eps: f64,
    max_depth: usize,
    inv_mass: &[f64],
) -> (State, f64, bool) {
    let dim = current.q.len();
    let mut state = current;
    for i in 0..dim {
        state.p[i] = standard_normal(rng) / sqrt(inv_mass[i]);
    }
    let joint0 = state.joint(inv_mass);
    let log_u = joint0 - exponential(rng);

    let mut minus = state.clone();
    let mut plus = state.clone();
    let mut proposal = state.q.clone();
    let mut n_valid = 1.0f64;
    let mut diverged = false;
    let mut accept_sum = 0.0;
    let mut n_accept = 0.0;

    for depth in 0..max_depth {
        let dir = if uniform(rng) < 0.5 { -1.0 } else { 1.0 };
        let from = if dir < 0.0 { &minus } else { &plus };
        let tree =
            build_tree(target, rng, from, log_u, dir, depth, eps, joint0, inv_mass);
        diverged |= tree.diverged;
        accept_sum += tree.accept_sum;
        n_accept += tree.n_accept;
        let keep = tree.keep_going;
        if dir < 0.0 {
            minus = tree.minus;
        } else {
            plus = tree.plus;
        }
        if keep && uniform(rng) < tree.n_valid / n_valid {
            proposal = tree.proposal;
        }
        n_valid += tree.n_valid;
        if !keep || !no_uturn(&minus, &plus, inv_mass) {
            break;
        }
    }
    let mut grad = vec![0.0; dim];
    let lp = target.log_density_grad(&proposal, &mut grad);
    let accept_stat = if n_accept > 0.0 { accept_sum / n_accept } else { 0.0 };
    (State { q: proposal, p: vec![0.0; dim], grad, lp }, accept_stat, diverged)
}

// ---- Adaptation ------------------------------------------------------------

/// Nesterov dual averaging of log step size.
struct DualAverage {
    mu: f64,
    log_eps: f64,
    log_eps_bar: f64,
    h_bar: f64,
    count: f64,
    target: f64,
}

impl DualAverage {
    const GAMMA: f64 = 0.05;
    const T0: f64 = 10.0;
    const KAPPA: f64 = 0.75;

    fn new(eps0: f64, target: f64) -> DualAverage {
        DualAverage {
            mu: ln(10.0 * eps0),
            log_eps: ln(eps0),
            log_eps_bar: 0.0,
            h_bar: 0.0,
            count: 0.0,
            target,
        }
    }

    fn update(&mut self, accept: f64) {
        self.count += 1.0;
        let w = 1.0 / (self.count + Self::T0);
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - accept);
        self.log_eps = self.mu - sqrt(self.count) / Self::GAMMA * self.h_bar;
        let w2 = libm::pow(self.count, -Self::KAPPA);
        self.log_eps_bar = w2 * self.log_eps + (1.0 - w2) * self.log_eps_bar;
    }

    fn current(&self) -> f64 {
        exp(self.log_eps)
    }

    fn averaged(&self) -> f64 {
        exp(self.log_eps_bar)
    }
}

/// Online variance accumulator for the diagonal metric.
struct Welford {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(dim: usize) -> Welford {
        Welford { n: 0.0, mean: vec![0.0; dim], m2: vec![0.0; dim] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1.0;
        for i in 0..x.len() {
            let d = x[i] - self.mean[i];
            self.mean[i] += d / self.n;
            self.m2[i] += d * (x[i] - self.mean[i]);
        }
    }

    /// Regularized variance estimate, shrunk toward unit scale.
    fn variances(&self) -> Vec<f64> {
        let n = self.n;
        self.m2
            .iter()
            .map(|&m2| {
                let var = if n > 1.0 { m2 / (n - 1.0) } else { 1.0 };
                (n / (n + 5.0)) * var + 1e-3 * (5.0 / (n + 5.0))
            })
            .collect()
    }
}

/// Crude doubling search for an initial step size with accept ratio near 0.5.
fn find_initial_step(
    target: &dyn LogDensity,
    rng: &mut ChaCha8Rng,
    state: &State,
    inv_mass: &[f64],
) -> f64 {
    let mut eps = 1.0;
    let mut probe = state.clone();
    for p in probe.p.iter_mut() {
        *p = standard_normal(rng);
    }
    let joint0 = probe.joint(inv_mass);
    let mut step = probe.clone();
    leapfrog(target, &mut step, eps, 1.0, inv_mass);
    let mut delta = step.joint(inv_mass) - joint0;
    if !delta.is_finite() {
        delta = f64::NEG_INFINITY;
    }
    let go_up = delta > -core::f64::consts::LN_2;
    let scale = if go_up { 2.0 } else { 0.5 };
    for _ in 0..50 {
        eps *= scale;
        let mut step = probe.clone();
        leapfrog(target, &mut step, eps, 1.0, inv_mass);
        let delta = step.joint(inv_mass) - joint0;
        let still = if go_up {
            delta > -core::f64::consts::LN_2
        } else {
            !(delta > -core::f64::consts::LN_2)
        };
        if !still || !delta.is_finite() && go_up {
            break;
        }
    }
    eps.clamp(1e-8, 10.0)
}

/// Warmup phase boundaries: initial step-size buffer, metric-estimation
/// span of doubling windows, and a final step-size buffer.
fn metric_windows(n_warmup: usize) -> Vec<(usize, usize)> {
    let init = (n_warmup as f64 * 0.15) as usize;
    let terminal = (n_warmup as f64 * 0.10) as usize;
    let end = n_warmup - terminal;
    let mut windows = Vec::new();
    let mut start = init;
    let mut size = ((end - init) / 30).max(10);
    while start < end {
        let mut stop = start + size;
        // Absorb a remainder too small to double into the last window.
        if stop + 2 * size > end {
            stop = end;
        }
        windows.push((start, stop.min(end)));
        start = stop;
        size *= 2;
    }
    windows
}

// ---- Driver ----------------------------------------------------------------

/// Run one chain to completion.
pub fn sample_chain(
    target: &dyn LogDensity,
    config: &SamplerConfig,
    chain: usize,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<ChainOutput, SamplerError> {
    let dim = target.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(config.seed, chain));

    // Overdispersed initialization with a finite-density guard.
    let mut state = None;
    for _ in 0..100 {
        let q: Vec<f64> =
            (0..dim).map(|_| config.init_jitter * standard_normal(&mut rng)).collect();
        let mut grad = vec![0.0; dim];
        let lp = target.log_density_grad(&q, &mut grad);
        if lp.is_finite() && grad.iter().all(|g| g.is_finite()) {
            state = Some(State { q, p: vec![0.0; dim], grad, lp });
            break;
        }
    }
    let mut state = state.ok_or(SamplerError::NonFiniteInit { chain })?;

    let mut inv_mass = vec![1.0; dim];
    let eps0 = find_initial_step(target, &mut rng, &state, &inv_mass);
    let mut da = DualAverage::new(eps0, config.target_accept);
    let windows = metric_windows(config.n_warmup);
    let mut welford = Welford::new(dim);
    let mut window_idx = 0;

    for iter in 0..config.n_warmup {
        let eps = da.current();
        let (next, accept, _) =
            nuts_transition(target, &mut rng, state, eps, config.max_tree_depth, &inv_mass);
        state = next;
        da.update(accept);
        if window_idx < windows.len() {
            let (start, stop) = windows[window_idx];
            if iter >= start {
                welford.push(&state.q);
            }
            if iter + 1 == stop {
                inv_mass = welford.variances();
                welford = Welford::new(dim);
                window_idx += 1;
                // Re-tune the step size under the new metric.
                let eps = find_initial_step(target, &mut rng, &state, &inv_mass);
                da = DualAverage::new(eps, config.target_accept);
            }
        }
        progress(Progress::Warmup { chain, iter, total: config.n_warmup });
    }

    let eps = if config.n_warmup > 0 { da.averaged() } else { da.current() };
    let mut draws = Vec::with_capacity(config.n_samples * dim);
    let mut divergences = 0;
    let mut accept_total = 0.0;
    for iter in 0..config.n_samples {
        let (next, accept, diverged) =
            nuts_transition(target, &mut rng, state, eps, config.max_tree_depth, &inv_mass);
        state = next;
        if diverged {
            divergences += 1;
        }
        accept_total += accept;
        draws.extend_from_slice(&state.q);
        progress(Progress::Sampling { chain, iter, total: config.n_samples });
    }

    let rate = divergences as f64 / config.n_samples as f64;
    if rate > 0.5 {
        return Err(SamplerError::AllChainsDiverged { chain, rate });
    }
    Ok(ChainOutput {
        draws,
        stats: ChainStats {
            divergences,
            step_size: eps,
            mean_accept: accept_total / config.n_samples as f64,
        },
    })
}

/// Run all chains sequentially. Each chain's PRNG stream depends only on
/// (seed, chain index), so this matches any parallel scheduling.
pub fn sample(
    target: &dyn LogDensity,
    config: &SamplerConfig,
) -> Result<PosteriorDraws, SamplerError> {
    sample_with_progress(target, config, &|_| {})
}

pub fn sample_with_progress(
    target: &dyn LogDensity,
    config: &SamplerConfig,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<PosteriorDraws, SamplerError> {
    if config.n_samples == 0 || config.n_warmup == 0 {
        return Err(SamplerError::BadConfig("n_warmup and n_samples must be >= 1"));
    }
    if !(0.0..1.0).contains(&config.target_accept) || config.target_accept == 0.0 {
        return Err(SamplerError::BadConfig("target_accept must be in (0,1)"));
    }
    let chains: Result<Vec<ChainOutput>, SamplerError> = (0..config.n_chains)
        .map(|c| sample_chain(target, config, c, progress))
        .collect();
    Ok(PosteriorDraws::from_chains(target.dim(), config.n_samples, chains?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics;

    struct StdNormal {
        dim: usize,
    }

    impl LogDensity for StdNormal {
        fn dim(&self) -> usize {
            self.dim
        }

        fn log_density_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
            let mut lp = 0.0;
            for i in 0..self.dim {
                lp -= 0.5 * theta[i] * theta[i];
                grad[i] = -theta[i];
            }
            lp
        }
    }

    /// Rosenbrock-like banana in two dimensions.
    struct Banana;

    impl LogDensity for Banana {
        fn dim(&self) -> usize {
            2
        }

        fn log_density_grad(&self, t: &[f64], grad: &mut [f64]) -> f64 {
            let (x, y) = (t[0], t[1]);
            let a = y - x * x;
            let lp = -0.5 * x * x - 0.5 * a * a / 0.25;
            grad[0] = -x + 2.0 * x * a / 0.25;
            grad[1] = -a / 0.25;
            lp
        }
    }

    #[test]
    fn standard_normal_calibration() {
        let target = StdNormal { dim: 10 };
        let cfg = SamplerConfig { seed: 42, ..SamplerConfig::default() };
        let draws = sample(&target, &cfg).unwrap();
        for coord in 0..10 {
            let all: Vec<f64> = draws.iter_draws().map(|d| d[coord]).collect();
            let mean = all.iter().sum::<f64>() / all.len() as f64;
            let var =
                all.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / all.len() as f64;
            assert!(mean.abs() < 0.05, "coord {coord} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 0.1, "coord {coord} sd {}", var.sqrt());
        }
        assert_eq!(draws.total_divergences(), 0);
    }

    #[test]
    fn banana_converges() {
        let cfg = SamplerConfig {
            seed: 7,
            n_samples: 2000,
            target_accept: 0.9,
            ..SamplerConfig::default()
        };
        let draws = sample(&Banana, &cfg).unwrap();
        for coord in 0..2 {
            let chains = draws.coordinate_chains(coord);
            let refs: Vec<&[f64]> = chains.iter().map(|c| c.as_slice()).collect();
            let r = diagnostics::split_rhat(&refs);
            assert!(r < 1.01, "coord {coord} rhat {r}");
        }
    }

    #[test]
    fn seeded_replay_is_bit_identical() {
        let target = StdNormal { dim: 3 };
        let cfg = SamplerConfig {
            seed: 123,
            n_warmup: 200,
            n_samples: 200,
            ..SamplerConfig::default()
        };
        let a = sample(&target, &cfg).unwrap();
        let b = sample(&target, &cfg).unwrap();
        for (x, y) in a.iter_draws().zip(b.iter_draws()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn empirical_cdf_matches_normal() {
        // Kolmogorov-Smirnov smoke test on a 1-dim standard normal.
        let cfg = SamplerConfig { seed: 5, ..SamplerConfig::default() };
        let draws = sample(&StdNormal { dim: 1 }, &cfg).unwrap();
        let mut xs: Vec<f64> = draws.iter_draws().map(|d| d[0]).collect();
        xs.sort_unstable_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = crate::math::std_normal_cdf(x);
                let lo = (f - i as f64 / n).abs();
                let hi = (f - (i + 1) as f64 / n).abs();
                lo.max(hi)
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.03, "KS statistic {ks}");
    }

    #[test]
    fn leapfrog_is_second_order() {
        // Over a fixed integration time, halving the step size should cut
        // the energy error by about 4x.
        let target = Banana;
        let inv_mass = vec![1.0, 1.0];
        let mut start =
            State { q: vec![0.3, 0.8], p: vec![0.7, -0.4], grad: vec![0.0; 2], lp: 0.0 };
        start.lp = target.log_density_grad(&start.q, &mut start.grad);
        let e0 = start.joint(&inv_mass);
        let err = |n_steps: usize| {
            let eps = 1.0 / n_steps as f64;
            let mut s = start.clone();
            for _ in 0..n_steps {
                leapfrog(&target, &mut s, eps, 1.0, &inv_mass);
            }
            (s.joint(&inv_mass) - e0).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 4.0).abs() < 1.2, "ratio {ratio}");
    }

    #[test]
    fn init_failure_is_reported() {
        struct Hostile;
        impl LogDensity for Hostile {
            fn dim(&self) -> usize {
                1
            }
            fn log_density_grad(&self, _: &[f64], g: &mut [f64]) -> f64 {
                g[0] = 0.0;
                f64::NEG_INFINITY
            }
        }
        let cfg = SamplerConfig { n_chains: 1, ..SamplerConfig::default() };
        assert!(matches!(
            sample(&Hostile, &cfg),
            Err(SamplerError::NonFiniteInit { chain: 0 })
        ));
    }

    #[test]
    fn window_schedule_covers_adaptation_span() {
        let w = metric_windows(1000);
        assert_eq!(w.first().unwrap().0, 150);
        assert_eq!(w.last().unwrap().1, 900);
        for pair in w.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
    }
}
