//! Parameter vector layout, constraining transforms, and log priors.
//!
//! The sampler works on an unconstrained vector. Positive parameters are
//! log-transformed, the inflation weight is logit-transformed, and each
//! per-period ability block uses N_T - 1 free coordinates with the last
//! team's ability implied by the zero-sum constraint.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::likelihoods::Family;
use crate::math::{
    self, exp, half_cauchy_log_pdf, half_cauchy_log_pdf_dx, ln, log_add_exp, normal_log_pdf,
    std_normal_log_cdf,
};

/// Ability-dynamics regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dynamics {
    /// Abilities constant priors in every period, no temporal coupling.
    Static,
    /// Random walk with a single shared evolution precision.
    Owen,
    /// Random walk with separate attack/defence precisions.
    Egidi,
    /// Random walk with period- and type-specific commensurate precisions
    /// under spike-and-slab hyperpriors.
    Weighted,
}

impl Dynamics {
    pub const ALL: [Dynamics; 4] =
        [Dynamics::Static, Dynamics::Owen, Dynamics::Egidi, Dynamics::Weighted];

    pub fn code(self) -> &'static str {
        match self {
            Dynamics::Static => "static",
            Dynamics::Owen => "owen",
            Dynamics::Egidi => "egidi",
            Dynamics::Weighted => "weighted",
        }
    }

    pub fn from_code(code: &str) -> Option<Dynamics> {
        Dynamics::ALL.iter().copied().find(|d| d.code() == code)
    }
}

/// Prior hyperparameters. Defaults follow the reference configuration:
/// spike N+(100, 0.1), slab N+(0, 5), slab probability 0.99, half-Cauchy
/// scale 5 for evolution precisions and dispersion-type parameters.
#[derive(Debug, Clone, Copy)]
pub struct HyperParams {
    pub mu_spike: f64,
    pub sd_spike: f64,
    pub mu_slab: f64,
    pub sd_slab: f64,
    /// Prior probability of the slab (weak-borrowing) component.
    pub p_slab: f64,
    pub cauchy_scale: f64,
    pub home_prior_sd: f64,
    pub init_ability_sd: f64,
    pub intercept_prior_sd: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            mu_spike: 100.0,
            sd_spike: 0.1,
            mu_slab: 0.0,
            sd_slab: 5.0,
            p_slab: 0.99,
            cauchy_scale: 5.0,
            home_prior_sd: 5.0,
            init_ability_sd: 2.0,
            intercept_prior_sd: 5.0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), SpecError> {
        if !(self.sd_spike > 0.0 && self.sd_spike < self.sd_slab) {
            return Err(SpecError::BadHyper("need 0 < sd_spike < sd_slab"));
        }
        if !(0.0..=1.0).contains(&self.p_slab) {
            return Err(SpecError::BadHyper("p_slab must be in [0,1]"));
        }
        if self.cauchy_scale <= 0.0
            || self.home_prior_sd <= 0.0
            || self.init_ability_sd <= 0.0
            || self.intercept_prior_sd <= 0.0
        {
            return Err(SpecError::BadHyper("scales must be positive"));
        }
        Ok(())
    }
}

/// Full model choice: likelihood family x dynamics x dimensions.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub family: Family,
    pub dynamics: Dynamics,
    pub n_teams: usize,
    pub n_periods: usize,
    pub hyper: HyperParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecError {
    TooFewTeams,
    TooFewPeriods,
    BadHyper(&'static str),
}

impl core::fmt::Display for SpecError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpecError::TooFewTeams => write!(f, "model needs at least 2 teams"),
            SpecError::TooFewPeriods => {
                write!(f, "model needs at least 1 period (2 for weighted dynamics)")
            }
            SpecError::BadHyper(m) => write!(f, "bad hyperparameters: {m}"),
        }
    }
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.n_teams < 2 {
            return Err(SpecError::TooFewTeams);
        }
        let min_periods = if self.dynamics == Dynamics::Weighted { 2 } else { 1 };
        if self.n_periods < min_periods {
            return Err(SpecError::TooFewPeriods);
        }
        self.hyper.validate()
    }
}

/// Named, constrained parameters for one draw.
///
/// Ability matrices are stored period-major: `att[period * n_teams + team]`,
/// with 0-based period indices. Per period each ability type sums to zero.
#[derive(Debug, Clone)]
pub struct ParameterView {
    pub beta0: f64,
    pub home: f64,
    pub eta0: Option<f64>,
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub xi: Option<f64>,
    pub att: Vec<f64>,
    pub def: Vec<f64>,
    pub sigma: Option<f64>,
    pub sigma_att: Option<f64>,
    pub sigma_def: Option<f64>,
    /// Commensurate precisions for periods 2..T (weighted only), so index 0
    /// governs the step into the second period.
    pub phi_att: Vec<f64>,
    pub phi_def: Vec<f64>,
    n_teams: usize,
}

impl ParameterView {
    #[inline]
    pub fn att(&self, team: usize, period: usize) -> f64 {
        self.att[period * self.n_teams + team]
    }

    #[inline]
    pub fn def(&self, team: usize, period: usize) -> f64 {
        self.def[period * self.n_teams + team]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformError {
    NonFinite,
    DimMismatch { expected: usize, got: usize },
}

impl core::fmt::Display for TransformError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransformError::NonFinite => write!(f, "non-finite value in parameter vector"),
            TransformError::DimMismatch { expected, got } => {
                write!(f, "parameter vector has length {got}, expected {expected}")
            }
        }
    }
}

/// Immutable layout of the unconstrained vector for a given spec.
#[derive(Debug, Clone)]
pub struct ParameterSpace {
    spec: ModelSpec,
    dim: usize,
    idx_eta0: Option<usize>,
    idx_gamma: Option<usize>,
    idx_omega: Option<usize>,
    idx_xi: Option<usize>,
    off_att: usize,
    off_def: usize,
    off_dyn: usize,
}

impl ParameterSpace {
    pub fn build(spec: ModelSpec) -> Result<ParameterSpace, SpecError> {
        spec.validate()?;
        let mut next = 2; // beta0, home
        let mut take = |cond: bool| {
            if cond {
                next += 1;
                Some(next - 1)
            } else {
                None
            }
        };
        let idx_eta0 = take(spec.family.has_covariance());
        let idx_gamma = take(spec.family.has_dispersion());
        let idx_omega = take(spec.family.has_inflation());
        let idx_xi = take(spec.family.has_diag_param());
        let free = spec.n_teams - 1;
        let off_att = next;
        let off_def = off_att + free * spec.n_periods;
        let off_dyn = off_def + free * spec.n_periods;
        let n_dyn = match spec.dynamics {
            Dynamics::Static => 0,
            Dynamics::Owen => 1,
            Dynamics::Egidi => 2,
            Dynamics::Weighted => 2 * (spec.n_periods - 1),
        };
        Ok(ParameterSpace {
            spec,
            dim: off_dyn + n_dyn,
            idx_eta0,
            idx_gamma,
            idx_omega,
            idx_xi,
            off_att,
            off_def,
            off_dyn,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Dimension of the unconstrained vector.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn n_teams(&self) -> usize {
        self.spec.n_teams
    }

    fn n_periods(&self) -> usize {
        self.spec.n_periods
    }

    pub(crate) fn idx_eta0(&self) -> Option<usize> {
        self.idx_eta0
    }

    pub(crate) fn idx_gamma(&self) -> Option<usize> {
        self.idx_gamma
    }

    pub(crate) fn idx_omega(&self) -> Option<usize> {
        self.idx_omega
    }

    pub(crate) fn idx_xi(&self) -> Option<usize> {
        self.idx_xi
    }

    pub(crate) fn free_block_offset(&self, attack: bool, period: usize) -> usize {
        self.ability_block(attack, period)
    }

    /// Offset of the free-coordinate ability block for one period.
    #[inline]
    fn ability_block(&self, attack: bool, period: usize) -> usize {
        let base = if attack { self.off_att } else { self.off_def };
        base + period * (self.n_teams() - 1)
    }

    /// Expand one period's free coordinates into all N_T abilities.
    fn expand_period(&self, theta: &[f64], attack: bool, period: usize, out: &mut [f64]) {
        let t = self.n_teams();
        let block = &theta[self.ability_block(attack, period)..][..t - 1];
        let mut sum = 0.0;
        for (o, &a) in out[..t - 1].iter_mut().zip(block) {
            *o = a;
            sum += a;
        }
        out[t - 1] = -sum;
    }

    pub fn constrain(&self, theta: &[f64]) -> Result<ParameterView, TransformError> {
        if theta.len() != self.dim {
            return Err(TransformError::DimMismatch { expected: self.dim, got: theta.len() });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(TransformError::NonFinite);
        }
        let t = self.n_teams();
        let p = self.n_periods();
        let mut att = vec![0.0; t * p];
        let mut def = vec![0.0; t * p];
        for tau in 0..p {
            self.expand_period(theta, true, tau, &mut att[tau * t..(tau + 1) * t]);
            self.expand_period(theta, false, tau, &mut def[tau * t..(tau + 1) * t]);
        }
        let (mut sigma, mut sigma_att, mut sigma_def) = (None, None, None);
        let mut phi_att = Vec::new();
        let mut phi_def = Vec::new();
        match self.spec.dynamics {
            Dynamics::Static => {}
            Dynamics::Owen => sigma = Some(exp(theta[self.off_dyn])),
            Dynamics::Egidi => {
                sigma_att = Some(exp(theta[self.off_dyn]));
                sigma_def = Some(exp(theta[self.off_dyn + 1]));
            }
            Dynamics::Weighted => {
                let steps = p - 1;
                let hp = &self.spec.hyper;
                let tf = |&u: &f64| spike_slab_from_gauss(u, hp).0;
                phi_att = theta[self.off_dyn..][..steps].iter().map(tf).collect();
                phi_def = theta[self.off_dyn + steps..][..steps].iter().map(tf).collect();
            }
        }
        Ok(ParameterView {
            beta0: theta[0],
            home: theta[1],
            eta0: self.idx_eta0.map(|i| theta[i]),
            gamma: self.idx_gamma.map(|i| exp(theta[i])),
            omega: self.idx_omega.map(|i| math::logistic(theta[i])),
            xi: self.idx_xi.map(|i| exp(theta[i])),
            att,
            def,
            sigma,
            sigma_att,
            sigma_def,
            phi_att,
            phi_def,
            n_teams: t,
        })
    }

    pub fn unconstrain(&self, view: &ParameterView) -> Result<Vec<f64>, TransformError> {
        let t = self.n_teams();
        let mut theta = vec![0.0; self.dim];
        theta[0] = view.beta0;
        theta[1] = view.home;
        if let Some(i) = self.idx_eta0 {
            theta[i] = view.eta0.ok_or(TransformError::NonFinite)?;
        }
        if let Some(i) = self.idx_gamma {
            theta[i] = ln(view.gamma.ok_or(TransformError::NonFinite)?);
        }
        if let Some(i) = self.idx_omega {
            theta[i] = math::logit(view.omega.ok_or(TransformError::NonFinite)?);
        }
        if let Some(i) = self.idx_xi {
            theta[i] = ln(view.xi.ok_or(TransformError::NonFinite)?);
        }
        for tau in 0..self.n_periods() {
            let a = self.ability_block(true, tau);
            let d = self.ability_block(false, tau);
            for j in 0..t - 1 {
                theta[a + j] = view.att(j, tau);
                theta[d + j] = view.def(j, tau);
            }
        }
        match self.spec.dynamics {
            Dynamics::Static => {}
            Dynamics::Owen => theta[self.off_dyn] = ln(view.sigma.unwrap_or(1.0)),
            Dynamics::Egidi => {
                theta[self.off_dyn] = ln(view.sigma_att.unwrap_or(1.0));
                theta[self.off_dyn + 1] = ln(view.sigma_def.unwrap_or(1.0));
            }
            Dynamics::Weighted => {
                let steps = self.n_periods() - 1;
                let hp = &self.spec.hyper;
                for k in 0..steps {
                    theta[self.off_dyn + k] = gauss_from_spike_slab(view.phi_att[k], hp);
                    theta[self.off_dyn + steps + k] =
                        gauss_from_spike_slab(view.phi_def[k], hp);
                }
            }
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(TransformError::NonFinite);
        }
        Ok(theta)
    }

    /// Names of the constrained parameters, in the order produced by
    /// [`flatten_view`](Self::flatten_view). Periods are 1-based in names.
    pub fn constrained_names(&self) -> Vec<String> {
        let mut names = vec![String::from("beta0"), String::from("home")];
        if self.idx_eta0.is_some() {
            names.push(String::from("eta0"));
        }
        if self.idx_gamma.is_some() {
            names.push(String::from("gamma"));
        }
        if self.idx_omega.is_some() {
            names.push(String::from("omega"));
        }
        if self.idx_xi.is_some() {
            names.push(String::from("xi"));
        }
        for kind in ["att", "def"] {
            for tau in 0..self.n_periods() {
                for i in 0..self.n_teams() {
                    names.push(format!("{kind}[{i},{}]", tau + 1));
                }
            }
        }
        match self.spec.dynamics {
            Dynamics::Static => {}
            Dynamics::Owen => names.push(String::from("sigma")),
            Dynamics::Egidi => {
                names.push(String::from("sigma_att"));
                names.push(String::from("sigma_def"));
            }
            Dynamics::Weighted => {
                for kind in ["phi_att", "phi_def"] {
                    for tau in 1..self.n_periods() {
                        names.push(format!("{kind}[{}]", tau + 1));
                    }
                }
            }
        }
        names
    }

    /// Flatten a view into the order of [`constrained_names`](Self::constrained_names).
    pub fn flatten_view(&self, view: &ParameterView) -> Vec<f64> {
        let mut out = vec![view.beta0, view.home];
        out.extend(view.eta0);
        out.extend(view.gamma);
        out.extend(view.omega);
        out.extend(view.xi);
        out.extend_from_slice(&view.att);
        out.extend_from_slice(&view.def);
        out.extend(view.sigma);
        out.extend(view.sigma_att);
        out.extend(view.sigma_def);
        out.extend_from_slice(&view.phi_att);
        out.extend_from_slice(&view.phi_def);
        out
    }

    /// Log prior density on the unconstrained scale (Jacobians included),
    /// accumulating its gradient into `grad`.
    pub fn log_prior_grad(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.dim);
        debug_assert_eq!(grad.len(), self.dim);
        let hp = &self.spec.hyper;
        let t = self.n_teams();
        let p = self.n_periods();
        let mut lp = 0.0;

        // Intercepts and home effect.
        lp += normal_log_pdf(theta[0], 0.0, hp.intercept_prior_sd);
        grad[0] += -theta[0] / (hp.intercept_prior_sd * hp.intercept_prior_sd);
        lp += normal_log_pdf(theta[1], 0.0, hp.home_prior_sd);
        grad[1] += -theta[1] / (hp.home_prior_sd * hp.home_prior_sd);
        if let Some(i) = self.idx_eta0 {
            lp += normal_log_pdf(theta[i], 0.0, hp.intercept_prior_sd);
            grad[i] += -theta[i] / (hp.intercept_prior_sd * hp.intercept_prior_sd);
        }
        // Positive family parameters: half-Cauchy prior plus log Jacobian.
        for idx in [self.idx_gamma, self.idx_xi].into_iter().flatten() {
            let v = exp(theta[idx]);
            lp += half_cauchy_log_pdf(v, hp.cauchy_scale) + theta[idx];
            grad[idx] += v * half_cauchy_log_pdf_dx(v, hp.cauchy_scale) + 1.0;
        }
        // Inflation weight: uniform prior, logit Jacobian.
        if let Some(i) = self.idx_omega {
            let w = math::logistic(theta[i]);
            lp += ln(w) + math::ln_1p(-w);
            grad[i] += 1.0 - 2.0 * w;
        }

        // Initial-period abilities (and every period under static dynamics):
        // independent normals on the free coordinates.
        let init_var = hp.init_ability_sd * hp.init_ability_sd;
        let init_periods = if self.spec.dynamics == Dynamics::Static { p } else { 1 };
        for attack in [true, false] {
            for tau in 0..init_periods {
                let off = self.ability_block(attack, tau);
                for j in 0..t - 1 {
                    lp += normal_log_pdf(theta[off + j], 0.0, hp.init_ability_sd);
                    grad[off + j] += -theta[off + j] / init_var;
                }
            }
        }

        if self.spec.dynamics == Dynamics::Static || p == 1 {
            return lp;
        }

        // Random-walk terms over all N_T trajectories, including the
        // constraint-implied one; innovation variance is 1/precision.
        let mut cur = vec![0.0; t];
        let mut prev = vec![0.0; t];
        let mut g_con = vec![0.0; t * p]; // per-type scratch, reused
        for (attack, which) in [(true, 0usize), (false, 1usize)] {
            g_con.iter_mut().for_each(|g| *g = 0.0);
            self.expand_period(theta, attack, 0, &mut prev);
            let mut d_log_prec = vec![0.0; p - 1];
            for tau in 1..p {
                self.expand_period(theta, attack, tau, &mut cur);
                let prec = self.step_precision(theta, which, tau);
                for i in 0..t {
                    let delta = cur[i] - prev[i];
                    lp += -0.5 * math::LN_2PI + 0.5 * ln(prec) - 0.5 * prec * delta * delta;
                    g_con[tau * t + i] += -prec * delta;
                    g_con[(tau - 1) * t + i] += prec * delta;
                    d_log_prec[tau - 1] += 0.5 - 0.5 * prec * delta * delta;
                }
                core::mem::swap(&mut cur, &mut prev);
            }
            // Fold constrained-ability gradients onto the free coordinates.
            for tau in 0..p {
                let off = self.ability_block(attack, tau);
                let g_last = g_con[tau * t + t - 1];
                for j in 0..t - 1 {
                    grad[off + j] += g_con[tau * t + j] - g_last;
                }
            }
            // Precision gradient terms (on the log scale).
            match self.spec.dynamics {
                Dynamics::Owen => grad[self.off_dyn] += d_log_prec.iter().sum::<f64>(),
                Dynamics::Egidi => grad[self.off_dyn + which] += d_log_prec.iter().sum::<f64>(),
                Dynamics::Weighted => {
                    // d_log_prec is w.r.t. log(phi); chain through the
                    // prior-CDF transform to the sampled coordinate.
                    let base = self.off_dyn + which * (p - 1);
                    for (k, d) in d_log_prec.iter().enumerate() {
                        let (phi, dphi_du) = spike_slab_from_gauss(theta[base + k], hp);
                        grad[base + k] += d * dphi_du / phi;
                    }
                }
                Dynamics::Static => unreachable!(),
            }
        }

        // Hyperpriors on the precisions, with log Jacobians.
        match self.spec.dynamics {
            Dynamics::Static => {}
            Dynamics::Owen | Dynamics::Egidi => {
                let n = if self.spec.dynamics == Dynamics::Owen { 1 } else { 2 };
                for k in 0..n {
                    let idx = self.off_dyn + k;
                    let v = exp(theta[idx]);
                    lp += half_cauchy_log_pdf(v, hp.cauchy_scale) + theta[idx];
                    grad[idx] += v * half_cauchy_log_pdf_dx(v, hp.cauchy_scale) + 1.0;
                }
            }
            Dynamics::Weighted => {
                // Under the prior-CDF reparameterization the spike-and-slab
                // density and its Jacobian cancel exactly: u ~ N(0, 1).
                for k in 0..2 * (p - 1) {
                    let idx = self.off_dyn + k;
                    lp += normal_log_pdf(theta[idx], 0.0, 1.0);
                    grad[idx] += -theta[idx];
                }
            }
        }
        lp
    }

    #[inline]
    fn step_precision(&self, theta: &[f64], which: usize, tau: usize) -> f64 {
        match self.spec.dynamics {
            Dynamics::Owen => exp(theta[self.off_dyn]),
            Dynamics::Egidi => exp(theta[self.off_dyn + which]),
            Dynamics::Weighted => {
                let u = theta[self.off_dyn + which * (self.n_periods() - 1) + tau - 1];
                spike_slab_from_gauss(u, &self.spec.hyper).0
            }
            Dynamics::Static => unreachable!(),
        }
    }
}

/// Log density at `phi > 0` of a normal truncated below at zero.
fn log_trunc_normal(phi: f64, mu: f64, sd: f64) -> f64 {
    normal_log_pdf(phi, mu, sd) - std_normal_log_cdf(mu / sd)
}

/// CDF at `phi` of a normal truncated below at zero.
fn trunc_normal_cdf(phi: f64, mu: f64, sd: f64) -> f64 {
    let below = math::std_normal_cdf(-mu / sd);
    ((math::std_normal_cdf((phi - mu) / sd) - below) / (1.0 - below)).clamp(0.0, 1.0)
}

/// CDF of the spike-and-slab mixture.
pub fn spike_slab_cdf(phi: f64, hp: &HyperParams) -> f64 {
    if phi <= 0.0 {
        return 0.0;
    }
    (1.0 - hp.p_slab) * trunc_normal_cdf(phi, hp.mu_spike, hp.sd_spike)
        + hp.p_slab * trunc_normal_cdf(phi, hp.mu_slab, hp.sd_slab)
}

fn spike_slab_upper_bound(hp: &HyperParams) -> f64 {
    let spike = hp.mu_spike + 12.0 * hp.sd_spike;
    let slab = hp.mu_slab + 12.0 * hp.sd_slab;
    if spike > slab { spike } else { slab }
}

/// The commensurability precisions are sampled through their prior CDF:
/// `u ~ N(0,1)` and `phi = F^{-1}(Phi(u))`. On the log scale the spike is
/// a needle thousands of prior sds above the slab and gradient-based
/// transitions between the two regimes are impossible; in `u`-space the
/// spike occupies a contiguous band of width `1 - p_slab` right next to
/// the slab, so trajectories cross whenever the data favor it.
///
/// Returns `(phi, dphi/du)`; the derivative follows from
/// `f(phi) dphi = N(u | 0,1) du`.
pub fn spike_slab_from_gauss(u: f64, hp: &HyperParams) -> (f64, f64) {
    let q = math::std_normal_cdf(u);
    let mut lo = 0.0;
    let mut hi = spike_slab_upper_bound(hp);
    if spike_slab_cdf(hi, hp) < q {
        return (hi, 0.0); // beyond representable prior mass
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spike_slab_cdf(mid, hp) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let phi = 0.5 * (lo + hi);
    let dens = exp(log_spike_slab(phi, hp));
    (phi, exp(normal_log_pdf(u, 0.0, 1.0)) / dens.max(1e-290))
}

/// Inverse of [`spike_slab_from_gauss`]: the `u` whose transform is `phi`.
pub fn gauss_from_spike_slab(phi: f64, hp: &HyperParams) -> f64 {
    let q = spike_slab_cdf(phi, hp).clamp(1e-300, 1.0 - 1e-16);
    let mut u = math::std_normal_quantile(q);
    // Polish the closed-form quantile to full precision.
    for _ in 0..3 {
        let pdf = exp(normal_log_pdf(u, 0.0, 1.0));
        if pdf <= 0.0 {
            break;
        }
        u -= (math::std_normal_cdf(u) - q) / pdf;
    }
    u
}

/// Log density of the continuous spike-and-slab mixture of two
/// zero-truncated normals.
pub fn log_spike_slab(phi: f64, hp: &HyperParams) -> f64 {
    log_spike_slab_grad(phi, hp).0
}

/// Value and d/d phi of the spike-and-slab log density.
pub fn log_spike_slab_grad(phi: f64, hp: &HyperParams) -> (f64, f64) {
    let a = if hp.p_slab < 1.0 {
        math::ln_1p(-hp.p_slab) + log_trunc_normal(phi, hp.mu_spike, hp.sd_spike)
    } else {
        f64::NEG_INFINITY
    };
    let b = if hp.p_slab > 0.0 {
        ln(hp.p_slab) + log_trunc_normal(phi, hp.mu_slab, hp.sd_slab)
    } else {
        f64::NEG_INFINITY
    };
    let lp = log_add_exp(a, b);
    let wa = if a == f64::NEG_INFINITY { 0.0 } else { exp(a - lp) };
    let d = wa * (-(phi - hp.mu_spike) / (hp.sd_spike * hp.sd_spike))
        + (1.0 - wa) * (-(phi - hp.mu_slab) / (hp.sd_slab * hp.sd_slab));
    (lp, d)
}
