//! Uniform approximation of the interaction-time average.
//!
//! `cos(x t)` and `sin(x t)` are expanded in the Laguerre polynomials
//! `L_k(t)`, orthonormal under `e^{-t} dt`. Orthonormality collapses the
//! τ-integral of the pump dissipator onto one jump operator per retained
//! degree, with coefficients evaluated at `x = g_bar phi`.

use crate::error::{Error, Result};
use crate::fock::{BasisTag, FockDiagonal};
use crate::ladder::Ladder;
use crate::params::MaserParams;
use crate::quadrature::{exp_average_trig, TrigKind};
use crate::regression::{initial_sideband, linewidth_from_slope, SidebandGenerator};
use crate::steady_state::{from_recurrence, PhotonStatistics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigFamily {
    Cos,
    Sin,
}

/// `c_k(x) = ∫ e^{-t} L_k(t) trig(x t) dt` for `k = 0..=order`.
///
/// From the generating function, `c_k = Re` (cos) or `Im` (sin) of
/// `(-i x)^k / (1 - i x)^{k+1}`.
pub fn laguerre_trig_coeffs(x: f64, family: TrigFamily, order: usize) -> Vec<f64> {
    let (mut re, mut im) = complex_coeff_start(x);
    let (step_re, step_im) = complex_ratio(x);
    let mut out = Vec::with_capacity(order + 1);
    for _ in 0..=order {
        out.push(match family {
            TrigFamily::Cos => re,
            TrigFamily::Sin => im,
        });
        let next_re = re * step_re - im * step_im;
        let next_im = re * step_im + im * step_re;
        re = next_re;
        im = next_im;
    }
    out
}

/// `1 / (1 - i x) = (1 + i x) / (1 + x^2)`.
fn complex_coeff_start(x: f64) -> (f64, f64) {
    let d = 1.0 + x * x;
    (1.0 / d, x / d)
}

/// `-i x / (1 - i x) = (x^2 - i x) / (1 + x^2)`.
fn complex_ratio(x: f64) -> (f64, f64) {
    let d = 1.0 + x * x;
    (x * x / d, -x / d)
}

/// Orthonormal Laguerre polynomials `L_0(t)..L_order(t)`.
pub fn laguerre_values(t: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(1.0);
    if order >= 1 {
        out.push(1.0 - t);
    }
    for k in 1..order {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Maximum retained degrees of the sine and cosine expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformOrders {
    pub sin: usize,
    pub cos: usize,
}

impl UniformOrders {
    /// Odd sine degree with the cosine one below it.
    pub fn paired(order_sin: usize) -> Self {
        Self {
            sin: order_sin,
            cos: order_sin.saturating_sub(1),
        }
    }

    pub fn is_standard_pairing(&self) -> bool {
        self.sin >= 1 && self.sin % 2 == 1 && self.cos + 1 == self.sin
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingRule {
    /// Odd sine degree, cosine degree one lower.
    #[default]
    Standard,
    Any,
}

/// Truncated jump-operator set on `|0>..|n_max>`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformLindbladSet {
    pub orders: UniformOrders,
    /// `c_k^cos(g_bar phi)`, degrees `0..=orders.cos`.
    pub cos_coeffs: Vec<FockDiagonal>,
    /// `c_k^sin(g_bar phi)`, degrees `0..=orders.sin`.
    pub sin_coeffs: Vec<FockDiagonal>,
    pub tau_bar: f64,
    pub params: MaserParams,
}

pub fn build_uniform_lindblad(
    params: &MaserParams,
    orders: UniformOrders,
    n_max: usize,
) -> Result<UniformLindbladSet> {
    build_uniform_lindblad_with(params, orders, n_max, PairingRule::Standard)
}

pub fn build_uniform_lindblad_with(
    params: &MaserParams,
    orders: UniformOrders,
    n_max: usize,
    rule: PairingRule,
) -> Result<UniformLindbladSet> {
    params.validate()?;
    let tau_bar = match params.tau_dist {
        crate::params::InteractionTimeDistribution::Exponential { tau_bar } => tau_bar,
        _ => return Err(Error::UnsupportedDistribution("build_uniform_lindblad")),
    };
    if rule == PairingRule::Standard && !orders.is_standard_pairing() {
        return Err(Error::InvalidParameter(format!(
            "orders (sin {}, cos {}) are not an odd sine degree with the cosine one below",
            orders.sin, orders.cos
        )));
    }
    if n_max < 2 {
        return Err(Error::BasisTooSmall(n_max));
    }
    let g_bar = params.g * tau_bar;
    let top = orders.sin.max(orders.cos);
    let table: Vec<(Vec<f64>, Vec<f64>)> = (0..=n_max)
        .map(|m| {
            let x = g_bar * ((m + 1) as f64).sqrt();
            (
                laguerre_trig_coeffs(x, TrigFamily::Cos, top),
                laguerre_trig_coeffs(x, TrigFamily::Sin, top),
            )
        })
        .collect();
    let column = |k: usize, sin: bool| {
        FockDiagonal::from_values(
            table.iter().map(|(c, s)| if sin { s[k] } else { c[k] }).collect(),
            BasisTag::Phi,
        )
    };
    Ok(UniformLindbladSet {
        orders,
        cos_coeffs: (0..=orders.cos).map(|k| column(k, false)).collect(),
        sin_coeffs: (0..=orders.sin).map(|k| column(k, true)).collect(),
        tau_bar,
        params: params.clone(),
    })
}

impl UniformLindbladSet {
    pub fn n_max(&self) -> usize {
        self.sin_coeffs[0].n_max()
    }

    pub fn g_bar(&self) -> f64 {
        self.params.g * self.tau_bar
    }

    /// `r Σ_k c_k^sin(g_bar sqrt(m+1))^2`: the truncated gain out of `|m>`.
    pub fn gain(&self, m: usize) -> f64 {
        self.params.rate * self.sin_coeffs.iter().map(|c| c.get(m).powi(2)).sum::<f64>()
    }

    fn pair(coeffs: &[FockDiagonal], m1: usize, m2: usize) -> f64 {
        coeffs.iter().map(|c| c.get(m1) * c.get(m2)).sum()
    }

    /// Jump operators: cavity damping and thermal absorption, then the cosine
    /// family `sqrt(r) c_k^cos(g_bar phi)` and the sine family
    /// `sqrt(r) a^dag c_k^sin(g_bar phi) / phi`.
    pub fn jump_operators(&self) -> Vec<Ladder> {
        let p = &self.params;
        let n_max = self.n_max();
        let mut ops = vec![Ladder::annihilation().scaled((p.kappa * (1.0 + p.n_th)).sqrt())];
        if p.n_th > 0.0 {
            let amp = (p.kappa * p.n_th).sqrt();
            ops.push(Ladder::new(1, move |m| {
                if m < n_max {
                    amp * ((m + 1) as f64).sqrt()
                } else {
                    0.0
                }
            }));
        }
        let root_r = p.rate.sqrt();
        for c in &self.cos_coeffs {
            let values = c.values().to_vec();
            ops.push(Ladder::new(0, move |m| root_r * values.get(m).copied().unwrap_or(0.0)));
        }
        for s in &self.sin_coeffs {
            let values = s.values().to_vec();
            ops.push(Ladder::new(1, move |m| {
                if m < n_max {
                    root_r * values[m]
                } else {
                    0.0
                }
            }));
        }
        ops
    }

    /// Sideband generator of the truncated model.
    pub fn generator(&self) -> Result<SidebandGenerator> {
        let p = &self.params;
        let r = p.rate;
        let phi = |m: usize| ((m + 1) as f64).sqrt();
        let emission = p.kappa * (1.0 + p.n_th);
        let absorption = p.kappa * p.n_th;
        SidebandGenerator::from_pair_sums(
            self.n_max(),
            |m1, m2| r * Self::pair(&self.cos_coeffs, m1, m2),
            |m1, m2| r * Self::pair(&self.sin_coeffs, m1, m2) + absorption * phi(m1) * phi(m2),
            |m1, m2| emission * ((m1 * m2) as f64).sqrt(),
        )
    }

    /// Steady state of the truncated model from its birth-death balance.
    pub fn steady_state(&self) -> Result<PhotonStatistics> {
        let p = &self.params;
        let n_max = self.n_max();
        if p.rate == 0.0 && p.n_th == 0.0 {
            return Ok(PhotonStatistics::vacuum(n_max));
        }
        let ratio = |n: usize| {
            let up = self.gain(n) + p.kappa * p.n_th * (n + 1) as f64;
            up / (p.kappa * (1.0 + p.n_th) * (n + 1) as f64)
        };
        // Σ_k c_k^sin(x)^2 <= <sin^2(x t)> <= 1
        let bound = (p.rate / ((n_max + 1) as f64) + p.kappa * p.n_th) / (p.kappa * (1.0 + p.n_th));
        from_recurrence(n_max, ratio, bound)
    }

    /// n-resolved linewidth weight of the truncated model: the exact
    /// trig averages replaced by partial Laguerre sums.
    pub fn fock_weight(&self, n: usize) -> f64 {
        let g_bar = self.g_bar();
        let (up, down) = (((n + 1) as f64).sqrt(), (n as f64).sqrt());
        let c_up = laguerre_trig_coeffs(g_bar * up, TrigFamily::Cos, self.orders.cos);
        let c_down = laguerre_trig_coeffs(g_bar * down, TrigFamily::Cos, self.orders.cos);
        let s_up = laguerre_trig_coeffs(g_bar * up, TrigFamily::Sin, self.orders.sin);
        let s_down = laguerre_trig_coeffs(g_bar * down, TrigFamily::Sin, self.orders.sin);
        let cos: f64 = c_up.iter().zip(&c_down).map(|(a, b)| (a - b).powi(2)).sum();
        let sin: f64 = s_up
            .iter()
            .zip(&s_down)
            .map(|(a, b)| (up * a - down * b).powi(2))
            .sum();
        self.params.rate * (n as f64 * cos + sin)
    }
}

/// Exact n-resolved weight of the main formula for exponential interaction
/// times, `r <n (c_{n+1} - c_n)^2 + (sqrt(n+1) s_{n+1} - sqrt(n) s_n)^2>`.
pub fn exact_fock_weight(params: &MaserParams, n: usize) -> f64 {
    let g_bar = params.mean_coupling();
    let (up, down) = (((n + 1) as f64).sqrt(), (n as f64).sqrt());
    let (a, b) = (g_bar * up, g_bar * down);
    let cc = |x, y| exp_average_trig(TrigKind::CosCos, x, y);
    let ss = |x, y| exp_average_trig(TrigKind::SinSin, x, y);
    let nf = n as f64;
    let cos = nf * (cc(a, a) - 2.0 * cc(a, b) + cc(b, b));
    let sin = (nf + 1.0) * ss(a, a) - 2.0 * up * down * ss(a, b) + nf * ss(b, b);
    params.rate * (cos + sin)
}

/// First photon number where the truncated weight departs from the exact
/// one by more than `threshold` (relative), searching `0..=n_limit`.
pub fn breakdown_photon_number(set: &UniformLindbladSet, threshold: f64, n_limit: usize) -> Option<usize> {
    (0..=n_limit).find(|&n| {
        let exact = exact_fock_weight(&set.params, n);
        (set.fock_weight(n) - exact).abs() > threshold * exact.abs()
    })
}

/// Which photon statistics the truncated linewidth is averaged over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SteadyStateSource {
    /// Steady state of the truncated model itself.
    #[default]
    SelfConsistent,
    /// Steady state of the full model.
    Exact,
}

/// Initial-slope linewidth of the truncated generator for statistics `p`.
pub fn uniform_linewidth(set: &UniformLindbladSet, p: &PhotonStatistics) -> Result<f64> {
    if p.n_max() != set.n_max() {
        return Err(Error::InvalidParameter(format!(
            "statistics on {} states for an operator set on {}",
            p.n_max() + 1,
            set.n_max() + 1
        )));
    }
    let gen = set.generator()?;
    linewidth_from_slope(&gen, &initial_sideband(p))
}

/// Truncated linewidth with the steady state taken from `source`.
pub fn uniform_linewidth_from(set: &UniformLindbladSet, source: SteadyStateSource) -> Result<(f64, PhotonStatistics)> {
    let p = match source {
        SteadyStateSource::SelfConsistent => set.steady_state()?,
        SteadyStateSource::Exact => crate::steady_state::steady_state(&set.params, set.n_max())?,
    };
    Ok((uniform_linewidth(set, &p)?, p))
}
