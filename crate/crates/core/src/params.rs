//! Physical parameters of the maser and the interaction-time measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the normalization of user-supplied discrete weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// One node of a discretized interaction-time measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureNode {
    pub tau: f64,
    pub weight: f64,
}

/// Distribution of the time each atom spends in the cavity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionTimeDistribution {
    /// Every atom interacts for exactly `tau`.
    Fixed { tau: f64 },
    /// Exponential density `exp(-tau / tau_bar) / tau_bar`.
    Exponential { tau_bar: f64 },
    /// Riemann or quadrature sum with weights summing to one.
    Discrete { nodes: Vec<QuadratureNode> },
}

impl InteractionTimeDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Fixed { tau } => positive_time("tau", *tau),
            Self::Exponential { tau_bar } => positive_time("tau_bar", *tau_bar),
            Self::Discrete { nodes } => {
                if nodes.is_empty() {
                    return Err(Error::InvalidParameter(
                        "discrete distribution has no nodes".into(),
                    ));
                }
                let mut total = 0.0;
                for node in nodes {
                    positive_time("tau_k", node.tau)?;
                    if !(node.weight > 0.0 && node.weight.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "discrete weight {} must be positive",
                            node.weight
                        )));
                    }
                    total += node.weight;
                }
                if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                    return Err(Error::InvalidParameter(format!(
                        "discrete weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Mean interaction time.
    pub fn mean_tau(&self) -> f64 {
        match self {
            Self::Fixed { tau } => *tau,
            Self::Exponential { tau_bar } => *tau_bar,
            Self::Discrete { nodes } => nodes.iter().map(|n| n.weight * n.tau).sum(),
        }
    }

    /// Largest interaction time in the support, `None` for unbounded support.
    pub fn max_tau(&self) -> Option<f64> {
        match self {
            Self::Fixed { tau } => Some(*tau),
            Self::Exponential { .. } => None,
            Self::Discrete { nodes } => nodes.iter().map(|n| n.tau).reduce(f64::max),
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Fixed { tau } => Self::Fixed { tau: tau * factor },
            Self::Exponential { tau_bar } => Self::Exponential {
                tau_bar: tau_bar * factor,
            },
            Self::Discrete { nodes } => Self::Discrete {
                nodes: nodes
                    .iter()
                    .map(|n| QuadratureNode {
                        tau: n.tau * factor,
                        weight: n.weight,
                    })
                    .collect(),
            },
        }
    }
}

fn positive_time(name: &str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {t} must be a positive time")))
    }
}

/// Rates of the micromaser master equation plus the interaction-time measure.
///
/// `kappa` is the cavity decay rate, `n_th` the thermal occupation, `rate`
/// the Poissonian atom injection rate and `g` the one-photon Rabi frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaserParams {
    pub kappa: f64,
    pub n_th: f64,
    pub rate: f64,
    pub g: f64,
    pub tau_dist: InteractionTimeDistribution,
}

impl MaserParams {
    pub fn new(
        kappa: f64,
        n_th: f64,
        rate: f64,
        g: f64,
        tau_dist: InteractionTimeDistribution,
    ) -> Result<Self> {
        let params = Self {
            kappa,
            n_th,
            rate,
            g,
            tau_dist,
        };
        params.validate()?;
        Ok(params)
    }

    /// Fixed interaction time with `g tau = g_tau` and `tau = 1 / kappa`.
    pub fn fixed(kappa: f64, n_th: f64, rate: f64, g_tau: f64) -> Result<Self> {
        Self::new(
            kappa,
            n_th,
            rate,
            g_tau * kappa,
            InteractionTimeDistribution::Fixed { tau: 1.0 / kappa },
        )
    }

    /// Exponentially distributed interaction time with `g tau_bar = g_bar`.
    pub fn exponential(kappa: f64, n_th: f64, rate: f64, g_bar: f64) -> Result<Self> {
        Self::new(
            kappa,
            n_th,
            rate,
            g_bar * kappa,
            InteractionTimeDistribution::Exponential {
                tau_bar: 1.0 / kappa,
            },
        )
    }

    /// Exponential model specified through the mean pump parameter `theta_bar`.
    pub fn exponential_theta(kappa: f64, n_th: f64, g_bar: f64, theta_bar: f64) -> Result<Self> {
        let rate = kappa * (theta_bar / g_bar).powi(2);
        Self::exponential(kappa, n_th, rate, g_bar)
    }

    /// Fixed-time model specified through the pump parameter `theta`.
    pub fn fixed_theta(kappa: f64, n_th: f64, rate: f64, theta: f64) -> Result<Self> {
        Self::fixed(kappa, n_th, rate, theta / (rate / kappa).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter(what.to_string()))
            }
        };
        check(self.kappa > 0.0 && self.kappa.is_finite(), "kappa must be > 0")?;
        check(self.n_th >= 0.0 && self.n_th.is_finite(), "n_th must be >= 0")?;
        check(self.rate >= 0.0 && self.rate.is_finite(), "rate must be >= 0")?;
        check(self.g > 0.0 && self.g.is_finite(), "g must be > 0")?;
        self.tau_dist.validate()?;
        if let Some(tau) = self.tau_dist.max_tau() {
            check(self.theta_at(tau).is_finite(), "pump parameter is not finite")?;
        }
        Ok(())
    }

    /// Same physics with time measured in units of `1 / kappa`.
    pub fn in_kappa_units(&self) -> Self {
        Self {
            kappa: 1.0,
            n_th: self.n_th,
            rate: self.rate / self.kappa,
            g: self.g / self.kappa,
            tau_dist: self.tau_dist.scaled(self.kappa),
        }
    }

    /// `r / kappa`.
    pub fn pump_ratio(&self) -> f64 {
        self.rate / self.kappa
    }

    /// `theta = (r / kappa)^{1/2} g tau`.
    pub fn theta_at(&self, tau: f64) -> f64 {
        self.pump_ratio().sqrt() * self.g * tau
    }

    /// Coupling `g <tau>` at the mean interaction time (`g tau` or `g tau_bar`).
    pub fn mean_coupling(&self) -> f64 {
        self.g * self.tau_dist.mean_tau()
    }

    /// Pump parameter at the mean interaction time (`theta` or `theta_bar`).
    pub fn mean_theta(&self) -> f64 {
        self.theta_at(self.tau_dist.mean_tau())
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.tau_dist, InteractionTimeDistribution::Exponential { .. })
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self.tau_dist, InteractionTimeDistribution::Fixed { .. })
    }

    /// Copy with a different interaction-time distribution.
    pub fn with_distribution(&self, tau_dist: InteractionTimeDistribution) -> Self {
        Self {
            tau_dist,
            ..self.clone()
        }
    }
}
