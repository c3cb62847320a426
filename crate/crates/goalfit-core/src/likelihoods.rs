//! Log pmfs for the six score models, with analytic gradients.
//!
//! All families share the log-linear scoring-rate map: the home rate
//! depends on the home side's attack and the away side's defence, and
//! vice versa. Everything is evaluated in log space; the bivariate
//! Poisson k-sum and all mixtures go through log-sum-exp.

use alloc::vec::Vec;

use crate::math::{self, exp, ln, ln_factorial, ln_gamma, log_add_exp, log_sum_exp, sqrt};

/// Score-model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    DoublePoisson,
    BivariatePoisson,
    DiagInflBivPoisson,
    NegBinomial,
    Skellam,
    ZeroInflSkellam,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::DoublePoisson,
        Family::BivariatePoisson,
        Family::DiagInflBivPoisson,
        Family::NegBinomial,
        Family::Skellam,
        Family::ZeroInflSkellam,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Family::DoublePoisson => "dp",
            Family::BivariatePoisson => "bp",
            Family::DiagInflBivPoisson => "dibp",
            Family::NegBinomial => "nb",
            Family::Skellam => "sm",
            Family::ZeroInflSkellam => "zism",
        }
    }

    pub fn from_code(code: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.code() == code)
    }

    /// Has the covariance rate (log lambda3 intercept eta0).
    pub fn has_covariance(self) -> bool {
        matches!(self, Family::BivariatePoisson | Family::DiagInflBivPoisson)
    }

    pub fn has_dispersion(self) -> bool {
        matches!(self, Family::NegBinomial)
    }

    pub fn has_inflation(self) -> bool {
        matches!(self, Family::DiagInflBivPoisson | Family::ZeroInflSkellam)
    }

    /// Has the diagonal-distribution parameter xi.
    pub fn has_diag_param(self) -> bool {
        matches!(self, Family::DiagInflBivPoisson)
    }

    /// Skellam-type families model the goal difference only.
    pub fn is_difference_model(self) -> bool {
        matches!(self, Family::Skellam | Family::ZeroInflSkellam)
    }
}

/// Expected-goals components for one match.
#[derive(Debug, Clone, Copy)]
pub struct ScoringRates {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Covariance component; 0 for families without it.
    pub lambda3: f64,
}

/// Family-level parameters beyond the rates.
#[derive(Debug, Clone, Copy)]
pub struct FamilyParams {
    pub family: Family,
    /// Dispersion (NB only); unused otherwise.
    pub gamma: f64,
    /// Inflation weight in [0,1] (DIBP, ZISM).
    pub omega: f64,
    /// Diagonal-distribution parameter (DIBP).
    pub xi: f64,
}

impl FamilyParams {
    pub fn plain(family: Family) -> FamilyParams {
        FamilyParams { family, gamma: 1.0, omega: 0.0, xi: 1.0 }
    }
}

/// The shared log-linear map from abilities to log rates.
///
/// Returns (log lambda1, log lambda2).
#[inline]
pub fn log_scoring_rates(
    beta0: f64,
    home: f64,
    att_home: f64,
    def_away: f64,
    att_away: f64,
    def_home: f64,
) -> (f64, f64) {
    (beta0 + home + att_home + def_away, beta0 + att_away + def_home)
}

#[inline]
fn log_poisson(x: u32, lambda: f64) -> f64 {
    x as f64 * ln(lambda) - lambda - ln_factorial(x as u64)
}

pub fn log_pmf_double_poisson(x: u32, y: u32, rates: &ScoringRates) -> f64 {
    log_poisson(x, rates.lambda1) + log_poisson(y, rates.lambda2)
}

/// log of the k-sum factor of the bivariate Poisson pmf, together with the
/// mean of k under the normalized summand weights (used by the gradient).
fn bp_ksum(x: u32, y: u32, rates: &ScoringRates) -> (f64, f64) {
    if rates.lambda3 == 0.0 || x == 0 || y == 0 {
        // Only the k = 0 term survives (or rho = 0 entirely).
        return (0.0, 0.0);
    }
    let log_rho = ln(rates.lambda3) - ln(rates.lambda1) - ln(rates.lambda2);
    let kmax = x.min(y);
    let (lx, ly) = (ln_factorial(x as u64), ln_factorial(y as u64));
    let mut terms = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax {
        let lk = ln_factorial(k as u64);
        // log [ C(x,k) C(y,k) k! rho^k ]
        let t = lx - lk - ln_factorial((x - k) as u64) + ly
            - lk
            - ln_factorial((y - k) as u64)
            + lk
            + k as f64 * log_rho;
        terms.push(t);
    }
    let log_s = log_sum_exp(&terms);
    let mean_k: f64 =
        terms.iter().enumerate().map(|(k, &t)| k as f64 * exp(t - log_s)).sum();
    (log_s, mean_k)
}

pub fn log_pmf_bivariate_poisson(x: u32, y: u32, rates: &ScoringRates) -> f64 {
    let (log_s, _) = bp_ksum(x, y, rates);
    -(rates.lambda1 + rates.lambda2 + rates.lambda3)
        + x as f64 * ln(rates.lambda1)
        + y as f64 * ln(rates.lambda2)
        - ln_factorial(x as u64)
        - ln_factorial(y as u64)
        + log_s
}

/// Diagonally inflated bivariate Poisson. The diagonal distribution is
/// Poisson(xi) over the tied score value.
pub fn log_pmf_dibp(x: u32, y: u32, rates: &ScoringRates, omega: f64, xi: f64) -> f64 {
    let base = log_pmf_bivariate_poisson(x, y, rates);
    if x != y {
        return math::ln_1p(-omega) + base;
    }
    let diag = log_poisson(x, xi);
    log_add_exp(math::ln_1p(-omega) + base, ln(omega) + diag)
}

fn log_negbin(x: u32, lambda: f64, gamma: f64) -> f64 {
    let r = 1.0 / gamma;
    ln_gamma(x as f64 + r) - ln_gamma(r) - ln_factorial(x as u64) + r * ln(r)
        - (x as f64 + r) * ln(r + lambda)
        + x as f64 * ln(lambda)
}

/// Two independent negative binomial margins, mean lambda and variance
/// lambda (1 + gamma lambda).
pub fn log_pmf_negbin_pair(x: u32, y: u32, rates: &ScoringRates, gamma: f64) -> f64 {
    log_negbin(x, rates.lambda1, gamma) + log_negbin(y, rates.lambda2, gamma)
}

/// log I_h(z) for the modified Bessel function of the first kind, via the
/// ascending series in log space. Terms are dropped once they fall 40 nats
/// below the running maximum on the decreasing side of the peak.
pub fn log_bessel_i(order: u32, z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let h = order as f64;
    let log_half_z = ln(z / 2.0);
    let mut terms = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut m = 0u64;
    loop {
        let t = (2.0 * m as f64 + h) * log_half_z
            - ln_factorial(m)
            - ln_gamma(m as f64 + h + 1.0);
        terms.push(t);
        if t > peak {
            peak = t;
        } else if t < peak - 40.0 {
            break;
        }
        m += 1;
    }
    log_sum_exp(&terms)
}

pub fn log_pmf_skellam(z: i32, rates: &ScoringRates) -> f64 {
    let s = 2.0 * sqrt(rates.lambda1 * rates.lambda2);
    -(rates.lambda1 + rates.lambda2)
        + 0.5 * z as f64 * (ln(rates.lambda1) - ln(rates.lambda2))
        + log_bessel_i(z.unsigned_abs(), s)
}

/// Zero-inflated Skellam: extra mass omega at a zero goal difference.
pub fn log_pmf_zi_skellam(z: i32, rates: &ScoringRates, omega: f64) -> f64 {
    let base = log_pmf_skellam(z, rates);
    if z != 0 {
        math::ln_1p(-omega) + base
    } else {
        log_add_exp(math::ln_1p(-omega) + base, ln(omega))
    }
}

/// Family dispatch on an observed score pair. Difference families reduce
/// the pair to z = x - y.
pub fn log_pmf(params: &FamilyParams, x: u32, y: u32, rates: &ScoringRates) -> f64 {
    match params.family {
        Family::DoublePoisson => log_pmf_double_poisson(x, y, rates),
        Family::BivariatePoisson => log_pmf_bivariate_poisson(x, y, rates),
        Family::DiagInflBivPoisson => log_pmf_dibp(x, y, rates, params.omega, params.xi),
        Family::NegBinomial => log_pmf_negbin_pair(x, y, rates, params.gamma),
        Family::Skellam => log_pmf_skellam(x as i32 - y as i32, rates),
        Family::ZeroInflSkellam => {
            log_pmf_zi_skellam(x as i32 - y as i32, rates, params.omega)
        }
    }
}

/// Per-observation gradient. Rate derivatives are with respect to the LOG
/// rates; gamma/omega/xi derivatives are on the natural scale.
#[derive(Debug, Clone, Copy, Default)]
pub struct ObsGrad {
    pub d_log_l1: f64,
    pub d_log_l2: f64,
    pub d_log_l3: f64,
    pub d_gamma: f64,
    pub d_omega: f64,
    pub d_xi: f64,
}

fn grad_bp(x: u32, y: u32, rates: &ScoringRates) -> (f64, f64, f64, f64) {
    let (log_s, mean_k) = bp_ksum(x, y, rates);
    let lp = -(rates.lambda1 + rates.lambda2 + rates.lambda3)
        + x as f64 * ln(rates.lambda1)
        + y as f64 * ln(rates.lambda2)
        - ln_factorial(x as u64)
        - ln_factorial(y as u64)
        + log_s;
    let d1 = x as f64 - rates.lambda1 - mean_k;
    let d2 = y as f64 - rates.lambda2 - mean_k;
    let d3 = mean_k - rates.lambda3;
    (lp, d1, d2, d3)
}

fn grad_negbin(x: u32, lambda: f64, gamma: f64) -> (f64, f64, f64) {
    let r = 1.0 / gamma;
    let lp = log_negbin(x, lambda, gamma);
    let d_log_lambda = x as f64 - lambda * (x as f64 + r) / (r + lambda);
    let d_r = math::digamma(x as f64 + r) - math::digamma(r) + ln(r) + 1.0
        - ln(r + lambda)
        - (x as f64 + r) / (r + lambda);
    // gamma = 1/r
    let d_gamma = -r * r * d_r;
    (lp, d_log_lambda, d_gamma)
}

fn grad_skellam(z: i32, rates: &ScoringRates) -> (f64, f64, f64) {
    let h = z.unsigned_abs();
    let s = 2.0 * sqrt(rates.lambda1 * rates.lambda2);
    let log_ih = log_bessel_i(h, s);
    let lp = -(rates.lambda1 + rates.lambda2)
        + 0.5 * z as f64 * (ln(rates.lambda1) - ln(rates.lambda2))
        + log_ih;
    // I_h'(s) = (I_{h-1}(s) + I_{h+1}(s)) / 2, with I_{-1} = I_1.
    let log_lo = log_bessel_i(if h == 0 { 1 } else { h - 1 }, s);
    let log_hi = log_bessel_i(h + 1, s);
    let ratio = 0.5 * (exp(log_lo - log_ih) + exp(log_hi - log_ih));
    // d s / d log lambda = s / 2 for either rate.
    let bessel_term = 0.5 * s * ratio;
    let d1 = -rates.lambda1 + 0.5 * z as f64 + bessel_term;
    let d2 = -rates.lambda2 - 0.5 * z as f64 + bessel_term;
    (lp, d1, d2)
}

/// Log pmf and gradient for one observation under any family.
pub fn log_pmf_grad(
    params: &FamilyParams,
    x: u32,
    y: u32,
    rates: &ScoringRates,
) -> (f64, ObsGrad) {
    let mut g = ObsGrad::default();
    let lp = match params.family {
        Family::DoublePoisson => {
            g.d_log_l1 = x as f64 - rates.lambda1;
            g.d_log_l2 = y as f64 - rates.lambda2;
            log_pmf_double_poisson(x, y, rates)
        }
        Family::BivariatePoisson => {
            let (lp, d1, d2, d3) = grad_bp(x, y, rates);
            g.d_log_l1 = d1;
            g.d_log_l2 = d2;
            g.d_log_l3 = d3;
            lp
        }
        Family::DiagInflBivPoisson => {
            let omega = params.omega;
            let xi = params.xi;
            let (lp_bp, d1, d2, d3) = grad_bp(x, y, rates);
            if x != y {
                g.d_log_l1 = d1;
                g.d_log_l2 = d2;
                g.d_log_l3 = d3;
                g.d_omega = -1.0 / (1.0 - omega);
                math::ln_1p(-omega) + lp_bp
            } else {
                let a = math::ln_1p(-omega) + lp_bp;
                let b = ln(omega) + log_poisson(x, xi);
                let lp = log_add_exp(a, b);
                let wa = exp(a - lp);
                let wb = 1.0 - wa;
                g.d_log_l1 = wa * d1;
                g.d_log_l2 = wa * d2;
                g.d_log_l3 = wa * d3;
                g.d_omega = -wa / (1.0 - omega) + wb / omega;
                g.d_xi = wb * (x as f64 / xi - 1.0);
                lp
            }
        }
        Family::NegBinomial => {
            let (lp1, d1, dg1) = grad_negbin(x, rates.lambda1, params.gamma);
            let (lp2, d2, dg2) = grad_negbin(y, rates.lambda2, params.gamma);
            g.d_log_l1 = d1;
            g.d_log_l2 = d2;
            g.d_gamma = dg1 + dg2;
            lp1 + lp2
        }
        Family::Skellam => {
            let (lp, d1, d2) = grad_skellam(x as i32 - y as i32, rates);
            g.d_log_l1 = d1;
            g.d_log_l2 = d2;
            lp
        }
        Family::ZeroInflSkellam => {
            let z = x as i32 - y as i32;
            let omega = params.omega;
            let (lp_sm, d1, d2) = grad_skellam(z, rates);
            if z != 0 {
                g.d_log_l1 = d1;
                g.d_log_l2 = d2;
                g.d_omega = -1.0 / (1.0 - omega);
                math::ln_1p(-omega) + lp_sm
            } else {
                let a = math::ln_1p(-omega) + lp_sm;
                let b = ln(omega);
                let lp = log_add_exp(a, b);
                let wa = exp(a - lp);
                g.d_log_l1 = wa * d1;
                g.d_log_l2 = wa * d2;
                g.d_omega = -wa / (1.0 - omega) + (1.0 - wa) / omega;
                lp
            }
        }
    };
    (lp, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    const R: ScoringRates = ScoringRates { lambda1: 1.5, lambda2: 0.8, lambda3: 0.0 };

    fn rates(l1: f64, l2: f64, l3: f64) -> ScoringRates {
        ScoringRates { lambda1: l1, lambda2: l2, lambda3: l3 }
    }

    #[test]
    fn scoring_rate_map() {
        assert_eq!(log_scoring_rates(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), (0.0, 0.0));
        let (l1, l2) = log_scoring_rates(0.1, 0.3, 0.4, -0.2, 0.0, 0.1);
        assert!((l1 - 0.6).abs() < 1e-15);
        assert!((l2 - 0.2).abs() < 1e-15);
        // Swapping sides (home effect zeroed) swaps the outputs.
        let (a, b) = log_scoring_rates(0.2, 0.0, 0.4, -0.2, 0.1, 0.3);
        let (c, d) = log_scoring_rates(0.2, 0.0, 0.1, 0.3, 0.4, -0.2);
        assert!((a - d).abs() < 1e-15 && (b - c).abs() < 1e-15);
    }

    #[test]
    fn double_poisson_values() {
        let r = rates(1.0, 1.0, 0.0);
        assert!((log_pmf_double_poisson(0, 0, &r) + 2.0).abs() < 1e-14);
        // Hand arithmetic at x=2, y=1.
        let expect = (-1.5f64 + 2.0 * 1.5f64.ln() - 2.0f64.ln()) + (-0.8f64 + 0.8f64.ln());
        assert!((log_pmf_double_poisson(2, 1, &R) - expect).abs() < 1e-12);
    }

    #[test]
    fn double_poisson_normalizes() {
        let r = rates(2.0, 2.0, 0.0);
        let total: f64 = (0..=60)
            .flat_map(|x| (0..=60).map(move |y| (x, y)))
            .map(|(x, y)| exp(log_pmf_double_poisson(x, y, &r)))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bivariate_reduces_to_double() {
        for x in 0..8 {
            for y in 0..8 {
                let d = log_pmf_bivariate_poisson(x, y, &R) - log_pmf_double_poisson(x, y, &R);
                assert!(d.abs() < 1e-12, "x={x} y={y}");
            }
        }
    }

    #[test]
    fn bivariate_at_origin() {
        let r = rates(1.0, 1.0, 1.0);
        assert!((log_pmf_bivariate_poisson(0, 0, &r) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn bivariate_marginal_is_poisson() {
        // Sum over y gives Poisson(x; lambda1 + lambda3).
        let r = rates(1.2, 0.9, 0.3);
        for x in 0..=10 {
            let m: f64 = (0..=80).map(|y| exp(log_pmf_bivariate_poisson(x, y, &r))).sum();
            let expect = exp(log_poisson(x, r.lambda1 + r.lambda3));
            assert!((m - expect).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn dibp_reductions_and_normalization() {
        let r = rates(1.3, 1.1, 0.2);
        for x in 0..6 {
            for y in 0..6 {
                let d = log_pmf_dibp(x, y, &r, 0.0, 0.5) - log_pmf_bivariate_poisson(x, y, &r);
                assert!(d.abs() < 1e-12);
            }
        }
        // Pure diagonal component.
        assert!((log_pmf_dibp(0, 0, &r, 1.0, 1.0) + 1.0).abs() < 1e-12);
        let total: f64 = (0..=60)
            .flat_map(|x| (0..=60).map(move |y| (x, y)))
            .map(|(x, y)| exp(log_pmf_dibp(x, y, &r, 0.1, 0.5)))
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn negbin_poisson_limit() {
        let r = rates(1.4, 1.4, 0.0);
        for x in 0..=10 {
            let nb = log_negbin(x, 1.4, 1e-8);
            let p = log_poisson(x, 1.4);
            assert!((nb - p).abs() < 1e-5, "x={x}: {nb} vs {p}");
        }
        // NB(0) = (1 + gamma lambda)^(-1/gamma); lambda = gamma = 1.
        assert!((log_negbin(0, 1.0, 1.0) + 2f64.ln()).abs() < 1e-12);
        let _ = r;
    }

    #[test]
    fn negbin_moments_brute_force() {
        let (lambda, gamma) = (2.0, 0.5);
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for x in 0..=500u32 {
            let p = exp(log_negbin(x, lambda, gamma));
            mean += x as f64 * p;
            m2 += (x as f64) * (x as f64) * p;
        }
        let var = m2 - mean * mean;
        assert!((mean - lambda).abs() < 1e-6);
        assert!((var - lambda * (1.0 + gamma * lambda)).abs() < 1e-6);
    }

    /// Quadrature oracle: I_h(z) = (1/pi) int_0^pi exp(z cos t) cos(h t) dt.
    fn bessel_i_quadrature(h: u32, z: f64) -> f64 {
        let n = 20_000;
        let step = core::f64::consts::PI / n as f64;
        let f = |t: f64| exp(z * libm::cos(t)) * libm::cos(h as f64 * t);
        let mut s = 0.5 * (f(0.0) + f(core::f64::consts::PI));
        for i in 1..n {
            s += f(i as f64 * step);
        }
        s * step / core::f64::consts::PI
    }

    #[test]
    fn bessel_log_series() {
        assert!(log_bessel_i(0, 1e-8).abs() < 1e-15);
        let oracle = bessel_i_quadrature(0, 2.0).ln();
        assert!((log_bessel_i(0, 2.0) - oracle).abs() < 1e-10);
        // Three-term recurrence: I_{h-1}(z) - I_{h+1}(z) = (2h/z) I_h(z).
        let (h, z) = (3u32, 4.0);
        let lhs = exp(log_bessel_i(h - 1, z)) - exp(log_bessel_i(h + 1, z));
        let rhs = 2.0 * h as f64 / z * exp(log_bessel_i(h, z));
        assert!((lhs - rhs).abs() < 1e-10);
        // Large argument sanity against quadrature.
        for &z in &[50.0, 200.0, 500.0] {
            let rel = (log_bessel_i(2, z) - bessel_i_quadrature(2, z).ln()).abs();
            assert!(rel < 1e-9, "z={z}");
        }
    }

    #[test]
    fn skellam_against_convolution() {
        let r = rates(1.0, 1.0, 0.0);
        // Brute-force difference of two Poissons.
        let conv = |z: i32, r: &ScoringRates| -> f64 {
            (0..=60i32)
                .filter_map(|x| {
                    let y = x - z;
                    (0..=60).contains(&y).then(|| {
                        exp(log_poisson(x as u32, r.lambda1) + log_poisson(y as u32, r.lambda2))
                    })
                })
                .sum()
        };
        assert!((exp(log_pmf_skellam(0, &r)) - conv(0, &r)).abs() < 1e-12);
        assert!((exp(log_pmf_skellam(0, &r)) - 0.30850832).abs() < 1e-7);
        let r2 = rates(2.1, 0.7, 0.0);
        for z in -10..=10 {
            assert!((log_pmf_skellam(z, &r2) - conv(z, &r2).ln()).abs() < 1e-10, "z={z}");
        }
        // Symmetry under swapping the rates.
        assert_eq!(log_pmf_skellam(3, &r2), log_pmf_skellam(-3, &rates(0.7, 2.1, 0.0)));
    }

    #[test]
    fn skellam_normalizes() {
        let r = rates(2.1, 0.7, 0.0);
        let total: f64 = (-60..=60).map(|z| exp(log_pmf_skellam(z, &r))).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zi_skellam_reductions() {
        let r = rates(1.4, 1.1, 0.0);
        for z in -6..=6 {
            let d = log_pmf_zi_skellam(z, &r, 0.0) - log_pmf_skellam(z, &r);
            assert!(d.abs() < 1e-12);
        }
        // omega = 1: point mass at zero.
        assert!(exp(log_pmf_zi_skellam(0, &r, 1.0)) == 1.0);
        assert_eq!(log_pmf_zi_skellam(1, &r, 1.0), f64::NEG_INFINITY);
        let total: f64 = (-60..=60).map(|z| exp(log_pmf_zi_skellam(z, &r, 0.15))).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    /// Central-difference check of every family's ObsGrad.
    #[test]
    fn obs_gradients_match_finite_differences() {
        let h = 1e-6;
        for family in Family::ALL {
            let params = FamilyParams { family, gamma: 0.7, omega: 0.23, xi: 0.9 };
            for &(x, y) in &[(0u32, 0u32), (2, 1), (3, 3), (1, 4)] {
                let r = rates(1.6, 0.9, if family.has_covariance() { 0.25 } else { 0.0 });
                let (_, g) = log_pmf_grad(&params, x, y, &r);
                let eval = |l1: f64, l2: f64, l3: f64, ga: f64, om: f64, xi: f64| {
                    let p = FamilyParams { family, gamma: ga, omega: om, xi };
                    log_pmf(&p, x, y, &rates(exp(l1), exp(l2), exp(l3)))
                };
                let (u1, u2) = (ln(r.lambda1), ln(r.lambda2));
                let u3 = if family.has_covariance() { ln(r.lambda3) } else { -30.0 };
                let fd = |f: &dyn Fn(f64) -> f64| (f(h) - f(-h)) / (2.0 * h);
                let checks = [
                    (g.d_log_l1, fd(&|e| eval(u1 + e, u2, u3, 0.7, 0.23, 0.9))),
                    (g.d_log_l2, fd(&|e| eval(u1, u2 + e, u3, 0.7, 0.23, 0.9))),
                    (g.d_gamma, fd(&|e| eval(u1, u2, u3, 0.7 + e, 0.23, 0.9))),
                    (g.d_omega, fd(&|e| eval(u1, u2, u3, 0.7, 0.23 + e, 0.9))),
                    (g.d_xi, fd(&|e| eval(u1, u2, u3, 0.7, 0.23, 0.9 + e))),
                ];
                for (i, (analytic, numeric)) in checks.iter().enumerate() {
                    // Slot 2..4 only applies to some families; the dispatcher
                    // returns 0 and the pmf ignores the parameter, so both
                    // sides are 0 where not applicable.
                    assert!(
                        (analytic - numeric).abs() < 1e-6 * (1.0 + numeric.abs()),
                        "{family:?} ({x},{y}) slot {i}: {analytic} vs {numeric}"
                    );
                }
                if family.has_covariance() {
                    let numeric = fd(&|e| eval(u1, u2, u3 + e, 0.7, 0.23, 0.9));
                    assert!((g.d_log_l3 - numeric).abs() < 1e-6 * (1.0 + numeric.abs()));
                }
            }
        }
    }
}
