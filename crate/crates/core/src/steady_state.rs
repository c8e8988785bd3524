//! Steady-state photon statistics from the detailed-balance recurrence.
//!
//! The stationary density operator is diagonal and its populations obey
//! `p_{n+1} = [n_th + <theta^2 sinc^2(g tau sqrt(n+1))>] p_n / (1 + n_th)`.
//! The recurrence runs in log space and is normalized once at the end, so
//! populations spanning hundreds of decades stay representable.

use crate::error::{Error, Result};
use crate::params::{InteractionTimeDistribution, MaserParams};
use crate::quadrature::{exp_average_trig, TrigKind};

/// Required ratio `p_N / max p` for a truncation to be accepted.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// `|sinc|` below which a node is treated as an exact trapping zero.
pub const TRAPPING_SINC: f64 = 1e-15;

/// Normalized populations `p_0..p_N` on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStatistics {
    p: Vec<f64>,
    tail_mass_bound: f64,
}

impl PhotonStatistics {
    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::BasisTooSmall(weights.len().saturating_sub(1)));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "populations must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("populations sum to zero".into()));
        }
        let p = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            p,
            tail_mass_bound: 0.0,
        })
    }

    /// `|0><0|` on a basis of size `n_max + 1`.
    pub fn vacuum(n_max: usize) -> Self {
        let mut p = vec![0.0; n_max + 1];
        p[0] = 1.0;
        Self {
            p,
            tail_mass_bound: 0.0,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Truncation `N` (highest Fock index kept).
    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    /// Upper bound on the population discarded above `N`.
    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.mean() == 0.0
    }

    /// Index of the largest population.
    pub fn mode(&self) -> usize {
        self.p
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (n, &p)| if p > best.1 { (n, p) } else { best })
            .0
    }

    /// Indices of strict local maxima of `p_n`.
    pub fn local_maxima(&self) -> Vec<usize> {
        let p = &self.p;
        (0..p.len())
            .filter(|&n| {
                let left = n == 0 || p[n] > p[n - 1];
                let right = n + 1 == p.len() || p[n] > p[n + 1];
                left && right && p[n] > 0.0
            })
            .collect()
    }
}

/// `(mean, variance)` of the photon number.
pub fn moments(p: &PhotonStatistics) -> (f64, f64) {
    let mean = p.mean();
    let second: f64 = p
        .probabilities()
        .iter()
        .enumerate()
        .map(|(n, p)| (n * n) as f64 * p)
        .sum();
    (mean, second - mean * mean)
}

/// Solves `p_{n+1} = ratio(n) p_n` on `0..=n_max` and normalizes.
///
/// A zero ratio is a hard zero: every later population vanishes.
/// `ratio_bound` bounds `ratio(n)` for all `n >= n_max` and feeds the tail
/// estimate.
pub fn from_recurrence(
    n_max: usize,
    ratio: impl Fn(usize) -> f64,
    ratio_bound: f64,
) -> Result<PhotonStatistics> {
    if n_max == 0 {
        return Err(Error::BasisTooSmall(n_max));
    }
    let log_p = log_populations(n_max, &ratio)?;
    let log_max = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unnormalized: Vec<f64> = log_p.iter().map(|l| (l - log_max).exp()).collect();
    let total: f64 = unnormalized.iter().sum();
    let p: Vec<f64> = unnormalized.iter().map(|u| u / total).collect();

    let max_p = p.iter().copied().fold(0.0, f64::max);
    let last = p[n_max];
    let trapped = ratio(n_max) == 0.0;
    if last > TAIL_TOLERANCE * max_p && !trapped {
        return Err(Error::TruncationInadequate {
            n: n_max,
            ratio: last / max_p,
        });
    }
    let tail_mass_bound = if last == 0.0 || trapped {
        0.0
    } else if ratio_bound < 1.0 {
        last * ratio_bound / (1.0 - ratio_bound)
    } else {
        f64::INFINITY
    };
    Ok(PhotonStatistics { p, tail_mass_bound })
}

fn log_populations(n_max: usize, ratio: &impl Fn(usize) -> f64) -> Result<Vec<f64>> {
    let mut log_p = Vec::with_capacity(n_max + 1);
    log_p.push(0.0);
    for n in 0..n_max {
        let q = ratio(n);
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::Numerical(format!("recurrence ratio {q} at n = {n}")));
        }
        let prev = log_p[n];
        log_p.push(if q == 0.0 { f64::NEG_INFINITY } else { prev + q.ln() });
    }
    Ok(log_p)
}

/// Gain term `<theta^2 sinc^2(g tau sqrt(n+1))>` of the recurrence.
pub fn gain_term(params: &MaserParams, n: usize) -> f64 {
    let pump = params.pump_ratio();
    let m = (n + 1) as f64;
    match &params.tau_dist {
        InteractionTimeDistribution::Exponential { tau_bar } => {
            let x = params.g * tau_bar * m.sqrt();
            pump * exp_average_trig(TrigKind::SinSin, x, x) / m
        }
        InteractionTimeDistribution::Fixed { tau } => node_gain(pump, params.g * tau, m),
        InteractionTimeDistribution::Discrete { nodes } => nodes
            .iter()
            .map(|node| node.weight * node_gain(pump, params.g * node.tau, m))
            .sum(),
    }
}

fn node_gain(pump: f64, g_tau: f64, m: f64) -> f64 {
    let x = g_tau * m.sqrt();
    let sinc = x.sin() / x;
    if sinc.abs() < TRAPPING_SINC {
        0.0
    } else {
        pump * g_tau * g_tau * sinc * sinc
    }
}

/// `p_{n+1} / p_n` for the full model.
pub fn recurrence_ratio(params: &MaserParams, n: usize) -> f64 {
    (params.n_th + gain_term(params, n)) / (1.0 + params.n_th)
}

/// Upper bound of [`recurrence_ratio`] for all `n >= n_max`.
fn ratio_bound(params: &MaserParams, n_max: usize) -> f64 {
    let m = (n_max + 1) as f64;
    let generic = params.pump_ratio() / m;
    let gain = match &params.tau_dist {
        InteractionTimeDistribution::Exponential { .. } => {
            let (g_bar, theta_bar) = (params.mean_coupling(), params.mean_theta());
            generic.min(2.0 * theta_bar * theta_bar / (1.0 + 4.0 * g_bar * g_bar * m))
        }
        _ => generic,
    };
    (params.n_th + gain) / (1.0 + params.n_th)
}

/// Steady state of the full model on `|0>..|n_max>`.
pub fn steady_state(params: &MaserParams, n_max: usize) -> Result<PhotonStatistics> {
    params.validate()?;
    if n_max == 0 {
        return Err(Error::BasisTooSmall(n_max));
    }
    if params.rate == 0.0 && params.n_th == 0.0 {
        return Ok(PhotonStatistics::vacuum(n_max));
    }
    from_recurrence(
        n_max,
        |n| recurrence_ratio(params, n),
        ratio_bound(params, n_max),
    )
}

/// Steady state of the exponential model at `n_th = 0` from
/// `p_{n+1} = 2 theta_bar^2 p_n / (1 + 4 g_bar^2 (n + 1))`.
pub fn steady_state_exp(params: &MaserParams, n_max: usize) -> Result<PhotonStatistics> {
    params.validate()?;
    if !params.is_exponential() {
        return Err(Error::UnsupportedDistribution("steady_state_exp"));
    }
    if params.n_th != 0.0 {
        return Err(Error::InvalidParameter(
            "the exponential closed form assumes n_th = 0".into(),
        ));
    }
    if n_max == 0 {
        return Err(Error::BasisTooSmall(n_max));
    }
    let g_bar = params.mean_coupling();
    let theta_bar = params.mean_theta();
    if theta_bar == 0.0 {
        return Ok(PhotonStatistics::vacuum(n_max));
    }
    let ratio = |n: usize| 2.0 * theta_bar * theta_bar / (1.0 + 4.0 * g_bar * g_bar * (n + 1) as f64);
    from_recurrence(n_max, ratio, ratio(n_max))
}

/// Limits for [`auto_truncation_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Accept `N` once `p_N / max p` drops below this.
    pub tail_tolerance: f64,
    /// Largest basis ever proposed.
    pub hard_limit: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-30,
            hard_limit: 20_000,
        }
    }
}

/// Photon number above which the recurrence ratio stays below one.
pub fn monotone_onset(params: &MaserParams) -> f64 {
    match &params.tau_dist {
        InteractionTimeDistribution::Exponential { .. } => {
            let (g_bar, theta_bar) = (params.mean_coupling(), params.mean_theta());
            ((2.0 * theta_bar * theta_bar - 1.0) / (4.0 * g_bar * g_bar)).max(0.0)
        }
        // theta^2 sinc^2(g tau sqrt(n+1)) <= (r / kappa) / (n + 1)
        _ => params.pump_ratio(),
    }
}

/// Truncation with the default policy.
pub fn auto_truncation(params: &MaserParams) -> Result<usize> {
    auto_truncation_with(params, &TruncationPolicy::default())
}

/// Smallest convenient `N` such that the ratio is below one for all
/// `n >= N / 4` and the population at `N` is below the policy tolerance.
pub fn auto_truncation_with(params: &MaserParams, policy: &TruncationPolicy) -> Result<usize> {
    params.validate()?;
    let onset = monotone_onset(params).ceil() as usize;
    let floor = 4 * onset.max(50);
    if floor > policy.hard_limit {
        return Err(Error::ResourceExhausted {
            limit: policy.hard_limit,
        });
    }
    if params.rate == 0.0 && params.n_th == 0.0 {
        return Ok(floor);
    }
    let threshold = policy.tail_tolerance.ln();
    let mut log_p = 0.0f64;
    let mut log_max = 0.0f64;
    for n in 0..policy.hard_limit {
        if n >= floor && log_p - log_max <= threshold {
            return Ok(n);
        }
        let q = recurrence_ratio(params, n);
        log_p = if q == 0.0 { f64::NEG_INFINITY } else { log_p + q.ln() };
        log_max = log_max.max(log_p);
    }
    if log_p - log_max <= threshold {
        return Ok(policy.hard_limit);
    }
    Err(Error::ResourceExhausted {
        limit: policy.hard_limit,
    })
}

/// Steady state on an automatically chosen basis.
pub fn steady_state_auto(params: &MaserParams) -> Result<PhotonStatistics> {
    steady_state(params, auto_truncation(params)?)
}
