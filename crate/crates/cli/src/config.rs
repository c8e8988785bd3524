//! Run configuration: JSON file, command-line overrides, per-command defaults.

use std::f64::consts::PI;
use std::path::Path;

use clap::{Args, ValueEnum};
use micromaser::{InteractionTimeDistribution, MaserParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dist {
    Fixed,
    Exp,
}

/// Scanned variable. `theta` means θ for fixed and θ̄ for exponential times;
/// it is reached through g·τ for fixed and through r for exponential times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScanVar {
    Gtau,
    Rate,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every field optional; the command fills the gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Cavity decay rate.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Thermal photon number.
    #[arg(long = "nth", allow_negative_numbers = true)]
    pub n_th: Option<f64>,
    /// Atom injection rate.
    #[arg(long, allow_negative_numbers = true)]
    pub rate: Option<f64>,
    /// Coupling times interaction time (mean time for `exp`); a
    /// comma-separated list for fock-resolved.
    #[arg(long = "g-tau", value_delimiter = ',', allow_negative_numbers = true)]
    pub g_tau: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub dist: Option<Dist>,
    #[arg(long, value_enum)]
    pub scan: Option<ScanVar>,
    #[arg(long, allow_negative_numbers = true)]
    pub min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fock truncation N (automatic when absent).
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Gauss-Laguerre node count for exponential times (adaptive when absent).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Sine-expansion orders for uniform-convergence.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn merged(self, flags: Overrides) -> Self {
        Self {
            kappa: flags.kappa.or(self.kappa),
            n_th: flags.n_th.or(self.n_th),
            rate: flags.rate.or(self.rate),
            g_tau: flags.g_tau.or(self.g_tau),
            dist: flags.dist.or(self.dist),
            scan: flags.scan.or(self.scan),
            min: flags.min.or(self.min),
            max: flags.max.or(self.max),
            steps: flags.steps.or(self.steps),
            trunc: flags.trunc.or(self.trunc),
            nodes: flags.nodes.or(self.nodes),
            orders: flags.orders.or(self.orders),
            format: flags.format.or(self.format),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    ScanTheta,
    FockResolved,
    Spectrum,
    UniformConvergence,
}

/// Fully resolved configuration, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub command: Command,
    pub kappa: f64,
    pub n_th: f64,
    pub rate: f64,
    pub g_tau: Vec<f64>,
    pub dist: Dist,
    pub scan: ScanVar,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: usize,
    pub trunc: Option<usize>,
    pub nodes: Option<usize>,
    pub orders: Vec<usize>,
    pub format: Format,
}

/// Largest accepted Fock truncation or node count.
const SIZE_LIMIT: usize = 20_000;

impl Resolved {
    pub fn new(command: Command, o: Overrides) -> Result<Self, CliError> {
        let kappa = o.kappa.unwrap_or(1.0);
        let (dist, n_th, rate, g_tau, scan) = match command {
            Command::ScanTheta => (Dist::Fixed, 0.01, 50.0, vec![2.0 * PI / 50f64.sqrt()], ScanVar::Gtau),
            Command::FockResolved => (
                Dist::Fixed,
                0.1,
                200.0,
                vec![2.1 * PI / 200f64.sqrt(), 2.2 * PI / 200f64.sqrt()],
                ScanVar::Gtau,
            ),
            Command::Spectrum => (Dist::Fixed, 0.01, 50.0, vec![2.0 * PI / 50f64.sqrt()], ScanVar::Gtau),
            Command::UniformConvergence => (Dist::Exp, 0.0, 1.0, vec![0.3], ScanVar::Theta),
        };
        let dist = o.dist.unwrap_or(dist);
        let n_th = o.n_th.unwrap_or(n_th);
        let rate = o.rate.unwrap_or(rate);
        let g_tau = o.g_tau.unwrap_or(g_tau);
        let scan = o.scan.unwrap_or(scan);
        let root = if rate > 0.0 { (rate / kappa).sqrt() } else { 1.0 };
        // Default ranges bracket θ/π ∈ [0.1, 4] and θ̄ ∈ [0.2, 3].
        let (min, max, steps) = match (command, scan) {
            (Command::ScanTheta, ScanVar::Gtau) => (Some(0.1 * PI / root), Some(4.0 * PI / root), 200),
            (Command::ScanTheta, ScanVar::Theta) => (Some(0.1 * PI), Some(4.0 * PI), 200),
            (Command::ScanTheta, ScanVar::Rate) => (Some(0.0), Some(100.0 * kappa), 200),
            (Command::UniformConvergence, ScanVar::Rate) => {
                let g = g_tau.first().copied().unwrap_or(0.3);
                (Some(kappa * (0.2 / g).powi(2)), Some(kappa * (3.0 / g).powi(2)), 29)
            }
            (Command::UniformConvergence, _) => (Some(0.2), Some(3.0), 29),
            // spectrum: ω window, centred on the peak with a span set by the FWHM when absent
            (Command::Spectrum, _) => (None, None, 401),
            (Command::FockResolved, _) => (None, None, 1),
        };
        let resolved = Self {
            command,
            kappa,
            n_th,
            rate,
            g_tau,
            dist,
            scan,
            min: o.min.or(min),
            max: o.max.or(max),
            steps: o.steps.unwrap_or(steps),
            trunc: o.trunc,
            nodes: o.nodes,
            orders: o.orders.unwrap_or_else(|| vec![1, 3, 7]),
            format: o.format.unwrap_or(Format::Csv),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa = {} must be positive", self.kappa));
        }
        if !(self.n_th >= 0.0 && self.n_th.is_finite()) {
            return bad(format!("nth = {} must be non-negative", self.n_th));
        }
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return bad(format!("rate = {} must be non-negative", self.rate));
        }
        if self.g_tau.is_empty() || self.g_tau.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return bad("g-tau values must be positive".into());
        }
        if self.g_tau.len() > 1 && self.command != Command::FockResolved {
            return bad("only fock-resolved accepts several g-tau values".into());
        }
        if self.steps == 0 {
            return bad("steps must be at least 1".into());
        }
        match (self.min, self.max) {
            (None, None) => {}
            (Some(lo), Some(hi)) if lo.is_finite() && hi.is_finite() && lo < hi => {}
            (lo, hi) => return bad(format!("need finite min < max, got {lo:?} and {hi:?}")),
        }
        if self.trunc.is_some_and(|n| n == 0 || n > SIZE_LIMIT) || self.nodes.is_some_and(|n| n == 0 || n > SIZE_LIMIT) {
            return bad(format!("trunc and nodes must lie in 1..={SIZE_LIMIT}"));
        }
        match self.command {
            Command::ScanTheta | Command::FockResolved if self.dist != Dist::Fixed => {
                bad("this command needs --dist fixed".into())
            }
            Command::ScanTheta if self.scan != ScanVar::Gtau && self.low() < 0.0 => {
                bad("rate and theta scans must start at a non-negative value".into())
            }
            Command::ScanTheta if self.scan == ScanVar::Theta && self.rate == 0.0 => {
                bad("a theta scan through g-tau needs rate > 0".into())
            }
            Command::ScanTheta if self.scan == ScanVar::Gtau && self.low() <= 0.0 => bad("g-tau scan must stay positive".into()),
            Command::UniformConvergence if self.dist != Dist::Exp => bad("uniform-convergence needs --dist exp".into()),
            Command::UniformConvergence if self.scan == ScanVar::Gtau => {
                bad("uniform-convergence scans theta_bar through the rate, not g-tau".into())
            }
            Command::UniformConvergence if self.n_th != 0.0 => bad("uniform-convergence assumes nth = 0".into()),
            Command::UniformConvergence if self.low() < 0.0 => bad("theta_bar and rate must be non-negative".into()),
            Command::UniformConvergence if self.orders.is_empty() || self.orders.iter().any(|k| k % 2 == 0) => {
                bad("orders must be odd sine degrees".into())
            }
            _ => Ok(()),
        }
    }

    /// Parameters for a given rate and coupling; the interaction time is `1 / kappa`.
    pub fn params(&self, rate: f64, g_tau: f64) -> Result<MaserParams, CliError> {
        let params = match self.dist {
            Dist::Fixed => MaserParams::fixed(self.kappa, self.n_th, rate, g_tau)?,
            Dist::Exp => MaserParams::exponential(self.kappa, self.n_th, rate, g_tau)?,
        };
        match (self.nodes, &params.tau_dist) {
            (Some(n), InteractionTimeDistribution::Exponential { .. }) => Ok(params
                .with_distribution(micromaser::quadrature::quadrature_nodes(&params.tau_dist, n)?)),
            _ => Ok(params),
        }
    }

    fn low(&self) -> f64 {
        self.min.unwrap_or(0.0)
    }

    /// Evenly spaced values over `[lo, hi]`; a single step sits at `lo`.
    pub fn grid_over(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.steps == 1 {
            return vec![lo];
        }
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }

    /// The scan grid of a ranged command.
    pub fn grid(&self) -> Vec<f64> {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) => self.grid_over(lo, hi),
            _ => Vec::new(),
        }
    }
}
