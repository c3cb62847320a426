//! Convergence diagnostics: rank-normalized split R-hat and bulk/tail
//! effective sample sizes with Geyer initial-monotone truncation.

use alloc::vec::Vec;

use crate::math::{quantile_sorted, std_normal_quantile};

/// ESS estimate; `degenerate` marks constant input where the
/// autocorrelation machinery is undefined and the raw draw count is
/// reported instead.
#[derive(Debug, Clone, Copy)]
pub struct Ess {
    pub value: f64,
    pub degenerate: bool,
}

/// Split each chain in half. Requires >= 4 draws per chain.
fn split_chains(chains: &[&[f64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        let n = c.len() / 2;
        // With an odd length the middle draw is dropped.
        out.push(c[..n].to_vec());
        out.push(c[c.len() - n..].to_vec());
    }
    out
}

/// Rank-normalize pooled draws: average ranks for ties, then the normal
/// quantile of (rank - 3/8) / (S + 1/4).
fn rank_normalize(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let total: usize = chains.iter().map(|c| c.len()).sum();
    let mut indexed: Vec<(f64, usize)> = Vec::with_capacity(total);
    for (ci, c) in chains.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            indexed.push((v, ci * total + i)); // unique tag per slot
        }
    }
    indexed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_of = alloc::collections::BTreeMap::new();
    let mut i = 0;
    while i < indexed.len() {
        let mut j = i;
        while j + 1 < indexed.len() && indexed[j + 1].0 == indexed[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for item in &indexed[i..=j] {
            rank_of.insert(item.1, avg_rank);
        }
        i = j + 1;
    }
    let s = total as f64;
    chains
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            (0..c.len())
                .map(|i| {
                    let r = rank_of[&(ci * total + i)];
                    std_normal_quantile((r - 0.375) / (s + 0.25))
                })
                .collect()
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Classic potential scale reduction over already-split chains.
fn rhat_of(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len() as f64;
    let n = chains[0].len() as f64;
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let grand = mean(&means);
    let b = n / (m - 1.0) * means.iter().map(|&x| (x - grand) * (x - grand)).sum::<f64>();
    let w = chains.iter().zip(&means).map(|(c, &m)| sample_var(c, m)).sum::<f64>() / m;
    if w <= 0.0 {
        return 1.0;
    }
    let var_plus = (n - 1.0) / n * w + b / n;
    libm::sqrt(var_plus / w)
}

fn is_constant(chains: &[&[f64]]) -> bool {
    let first = chains[0][0];
    chains.iter().all(|c| c.iter().all(|&v| v == first))
}

/// Rank-normalized split R-hat. Constant input returns exactly 1.0.
pub fn split_rhat(chains: &[&[f64]]) -> f64 {
    debug_assert!(chains.len() >= 2 && chains.iter().all(|c| c.len() >= 4));
    if is_constant(chains) {
        return 1.0;
    }
    rhat_of(&rank_normalize(&split_chains(chains)))
}

/// Multi-chain ESS over already-transformed split chains. Combines
/// per-chain autocovariances per the split-chain estimator, truncating the
/// autocorrelation sum with Geyer's initial monotone sequence.
fn ess_of(chains: &[Vec<f64>]) -> f64 {
    let m = chains.len();
    let n = chains[0].len();
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let vars: Vec<f64> = chains.iter().zip(&means).map(|(c, &mu)| sample_var(c, mu)).collect();
    let w = vars.iter().sum::<f64>() / m as f64;
    let grand = mean(&means);
    let b_over_n = if m > 1 {
        means.iter().map(|&x| (x - grand) * (x - grand)).sum::<f64>() / (m - 1) as f64
    } else {
        0.0
    };
    let var_plus = (n - 1) as f64 / n as f64 * w + b_over_n;
    if var_plus <= 0.0 {
        return (m * n) as f64;
    }
    let centered: Vec<Vec<f64>> = chains
        .iter()
        .zip(&means)
        .map(|(c, &mu)| c.iter().map(|&x| x - mu).collect())
        .collect();
    let acov = |t: usize| -> f64 {
        let mut s = 0.0;
        for c in &centered {
            let mut a = 0.0;
            for i in 0..n - t {
                a += c[i] * c[i + t];
            }
            s += a / n as f64;
        }
        s / m as f64
    };

    // rho_t = 1 - (W - mean autocovariance at lag t) / var_plus. Sum the
    // Geyer pairs P_k = rho_{2k} + rho_{2k+1} while positive, forcing the
    // sequence to be non-increasing; tau = -1 + 2 sum P_k.
    let rho = |t: usize| if t == 0 { 1.0 } else { 1.0 - (w - acov(t)) / var_plus };
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev);
        tau += 2.0 * pair;
        prev = pair;
        k += 1;
    }
    let tau = tau.max(1.0 / (m * n) as f64);
    (m * n) as f64 / tau
}

/// Bulk ESS: autocorrelation ESS of rank-normalized split draws.
pub fn ess_bulk(chains: &[&[f64]]) -> Ess {
    debug_assert!(!chains.is_empty() && chains.iter().all(|c| c.len() >= 4));
    let total: usize = chains.iter().map(|c| c.len()).sum();
    if is_constant(chains) {
        return Ess { value: total as f64, degenerate: true };
    }
    Ess { value: ess_of(&rank_normalize(&split_chains(chains))), degenerate: false }
}

/// Tail ESS: the worse of the ESS values for the 5% and 95% quantile
/// indicator transforms.
pub fn ess_tail(chains: &[&[f64]]) -> Ess {
    debug_assert!(!chains.is_empty() && chains.iter().all(|c| c.len() >= 4));
    let total: usize = chains.iter().map(|c| c.len()).sum();
    if is_constant(chains) {
        return Ess { value: total as f64, degenerate: true };
    }
    let mut pooled: Vec<f64> = chains.iter().flat_map(|c| c.iter().copied()).collect();
    pooled.sort_unstable_by(f64::total_cmp);
    let split = split_chains(chains);
    let mut worst = f64::INFINITY;
    for q in [0.05, 0.95] {
        let cut = quantile_sorted(&pooled, q);
        let indicator: Vec<Vec<f64>> = split
            .iter()
            .map(|c| c.iter().map(|&x| if x <= cut { 1.0 } else { 0.0 }).collect())
            .collect();
        if indicator.iter().flatten().all(|&v| v == indicator[0][0]) {
            continue; // indicator degenerate at this quantile
        }
        worst = worst.min(ess_of(&indicator));
    }
    if worst.is_infinite() {
        return Ess { value: total as f64, degenerate: true };
    }
    Ess { value: worst, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn uniform(rng: &mut ChaCha8Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn normal(rng: &mut ChaCha8Rng) -> f64 {
        // Box-Muller is fine for test data.
        let u1 = uniform(rng).max(1e-300);
        let u2 = uniform(rng);
        libm::sqrt(-2.0 * u1.ln()) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    fn iid_chains(m: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m).map(|_| (0..n).map(|_| normal(&mut rng)).collect()).collect()
    }

    fn as_refs(chains: &[Vec<f64>]) -> Vec<&[f64]> {
        chains.iter().map(|c| c.as_slice()).collect()
    }

    #[test]
    fn constant_chains_are_guarded() {
        let chains = vec![vec![2.5; 100], vec![2.5; 100]];
        assert_eq!(split_rhat(&as_refs(&chains)), 1.0);
        let e = ess_bulk(&as_refs(&chains));
        assert!(e.degenerate && e.value == 200.0);
        assert!(ess_tail(&as_refs(&chains)).degenerate);
    }

    #[test]
    fn iid_chains_look_converged() {
        let chains = iid_chains(4, 1000, 42);
        let r = split_rhat(&as_refs(&chains));
        assert!(r < 1.01, "rhat = {r}");
        let e = ess_bulk(&as_refs(&chains));
        assert!((3200.0..4800.0).contains(&e.value), "bulk ess = {}", e.value);
        let t = ess_tail(&as_refs(&chains));
        assert!(t.value > 1000.0, "tail ess = {}", t.value);
    }

    #[test]
    fn offset_chains_flagged() {
        let mut chains = iid_chains(2, 500, 7);
        for v in &mut chains[1] {
            *v += 10.0;
        }
        // Rank normalization bounds how far R-hat can grow for disjoint
        // chains, so the flag threshold here is 1.5 rather than 2.
        assert!(split_rhat(&as_refs(&chains)) > 1.5);
    }

    #[test]
    fn ar1_ess_near_analytic() {
        // AR(1) with coefficient rho has ESS ~= n (1-rho)/(1+rho).
        let rho: f64 = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let scale = libm::sqrt(1.0 - rho * rho);
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                let mut x = normal(&mut rng);
                (0..4000)
                    .map(|_| {
                        x = rho * x + scale * normal(&mut rng);
                        x
                    })
                    .collect()
            })
            .collect();
        let expect = 16000.0 * (1.0 - rho) / (1.0 + rho);
        let got = ess_bulk(&as_refs(&chains)).value;
        assert!(
            (got - expect).abs() < 0.3 * expect,
            "ess {got} vs analytic {expect}"
        );
    }
}
