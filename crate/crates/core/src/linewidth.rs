//! Linewidth as an average over the steady-state photon statistics.
//!
//! Every route here returns `D` such that the field correlation decays as
//! `g(t) ≈ <n> e^{-D t / 2}` at short times. The τ-average is a sum over
//! quadrature nodes; for the exponential measure the node count is chosen by
//! [`resolve_nodes`] and shared between formulas so that differences between
//! routes are differences between formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{diagonal_element, Ladder};
use crate::params::{MaserParams, QuadratureNode};
use crate::quadrature::converge_over_nodes;
use crate::steady_state::PhotonStatistics;

/// Total linewidth and its additive parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinewidthBreakdown {
    pub total: f64,
    /// `kappa n_th / <n>`.
    pub thermal: f64,
    /// Dephasing part from atoms that leave without exchanging a photon.
    pub cos: f64,
    /// Gain part.
    pub sin: f64,
    pub n_mean: f64,
}

fn mean_photons(p: &PhotonStatistics) -> Result<f64> {
    let n_mean = p.mean();
    if n_mean > 0.0 {
        Ok(n_mean)
    } else {
        Err(Error::Vacuum)
    }
}

/// Dephasing weight `n [cos(g tau sqrt(n+1)) - cos(g tau sqrt(n))]^2`.
pub fn cos_weight(g_tau: f64, n: usize) -> f64 {
    let (up, down) = (((n + 1) as f64).sqrt(), (n as f64).sqrt());
    let d = (g_tau * up).cos() - (g_tau * down).cos();
    n as f64 * d * d
}

/// Gain weight `[sqrt(n+1) sin(g tau sqrt(n+1)) - sqrt(n) sin(g tau sqrt(n))]^2`.
pub fn sin_weight(g_tau: f64, n: usize) -> f64 {
    let (up, down) = (((n + 1) as f64).sqrt(), (n as f64).sqrt());
    let d = up * (g_tau * up).sin() - down * (g_tau * down).sin();
    d * d
}

/// Integrand of the McGowan-Schieve trace at photon number `n`, for one τ.
pub fn mcgowan_weight(params: &MaserParams, g_tau: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let (up, down) = ((nf + 1.0).sqrt(), nf.sqrt());
    let pump = params.rate
        * (1.0
            - (g_tau * up).sin() * (g_tau * down).sin()
            - (g_tau * up).cos() * (g_tau * down).cos());
    let damping = params.kappa * (1.0 + params.n_th) * (nf - 0.5 - (nf * (nf - 1.0)).sqrt());
    let thermal = params.kappa * params.n_th * (nf + 0.5 - up * down);
    2.0 * (pump + damping + thermal) * nf
}

/// Quadrature nodes shared by the trace formulas.
///
/// Fixed and discrete measures use their own nodes. The exponential measure
/// doubles Gauss-Laguerre nodes until the main formula has converged.
pub fn resolve_nodes(params: &MaserParams, p: &PhotonStatistics) -> Result<Vec<QuadratureNode>> {
    mean_photons(p)?;
    converge_over_nodes(&params.tau_dist, |nodes| {
        Ok(linewidth_main_with_nodes(params, nodes, p)?.total)
    })
    .map(|(_, nodes)| nodes)
}

/// Dephasing-resolved linewidth:
/// `D <n> = kappa n_th + Σ_k Δp_k Σ_n p_n r {cos weight + sin weight}`.
pub fn linewidth_main(params: &MaserParams, p: &PhotonStatistics) -> Result<LinewidthBreakdown> {
    let nodes = resolve_nodes(params, p)?;
    linewidth_main_with_nodes(params, &nodes, p)
}

pub fn linewidth_main_with_nodes(
    params: &MaserParams,
    nodes: &[QuadratureNode],
    p: &PhotonStatistics,
) -> Result<LinewidthBreakdown> {
    let n_mean = mean_photons(p)?;
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    for (n, &pn) in p.probabilities().iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        for node in nodes {
            let g_tau = params.g * node.tau;
            cos_sum += pn * node.weight * cos_weight(g_tau, n);
            sin_sum += pn * node.weight * sin_weight(g_tau, n);
        }
    }
    let thermal = params.kappa * params.n_th / n_mean;
    let cos = params.rate * cos_sum / n_mean;
    let sin = params.rate * sin_sum / n_mean;
    Ok(LinewidthBreakdown {
        total: thermal + cos + sin,
        thermal,
        cos,
        sin,
        n_mean,
    })
}

/// Jump operators of the master equation on the given nodes.
///
/// `identity_shift` is added to every cosine operator; it cannot change the
/// dissipator.
pub fn jump_operators(
    params: &MaserParams,
    nodes: &[QuadratureNode],
    identity_shift: f64,
) -> Vec<Ladder> {
    let mut ops = Vec::with_capacity(2 + 2 * nodes.len());
    let decay = (params.kappa * (1.0 + params.n_th)).sqrt();
    ops.push(Ladder::annihilation().scaled(decay));
    if params.n_th > 0.0 {
        ops.push(Ladder::creation().scaled((params.kappa * params.n_th).sqrt()));
    }
    if params.rate > 0.0 {
        for node in nodes {
            let g_tau = params.g * node.tau;
            let amp = (params.rate * node.weight).sqrt();
            ops.push(Ladder::of_phi(move |x| amp * (g_tau * x).cos()).plus_identity(identity_shift));
            // sqrt(r Δp) g tau a^dag sinc(g tau phi): |n> -> sqrt(r Δp) sin(g tau sqrt(n+1)) |n+1>
            ops.push(Ladder::new(1, move |n| amp * (g_tau * ((n + 1) as f64).sqrt()).sin()));
        }
    }
    ops
}

/// Linewidth from the jump operators:
/// `D <n> = -Σ_λ tr{ L† [a†, L] a ρ + [L†, a†] L a ρ }`.
pub fn linewidth_from_lindblad(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    let nodes = resolve_nodes(params, p)?;
    linewidth_from_lindblad_with(params, &nodes, p, 0.0)
}

pub fn linewidth_from_lindblad_with(
    params: &MaserParams,
    nodes: &[QuadratureNode],
    p: &PhotonStatistics,
    identity_shift: f64,
) -> Result<f64> {
    let n_mean = mean_photons(p)?;
    let a = Ladder::annihilation();
    let ad = Ladder::creation();
    let mut acc = 0.0;
    for op in jump_operators(params, nodes, identity_shift) {
        let op_dag = op.adjoint();
        for (n, &pn) in p.probabilities().iter().enumerate() {
            if pn == 0.0 {
                continue;
            }
            // L† [a†, L] a  and  [L†, a†] L a, expanded.
            let first = diagonal_element(&[&op_dag, &ad, &op, &a], n)
                - diagonal_element(&[&op_dag, &op, &ad, &a], n);
            let second = diagonal_element(&[&op_dag, &ad, &op, &a], n)
                - diagonal_element(&[&ad, &op_dag, &op, &a], n);
            acc -= pn * (first + second);
        }
    }
    Ok(acc / n_mean)
}

/// Whether the first term of the narrow-distribution formula carries `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaConvention {
    /// `kappa (1 + 2 n_th) / (4 <n>)`.
    #[default]
    Restored,
    /// `(1 + 2 n_th) / (4 <n>)`, as originally printed.
    Literal,
}

/// Narrow-distribution linewidth
/// `D = kappa (1 + 2 n_th) / (4 <n>) + 4 r sin^2(g tau / (4 sqrt<n>))`.
pub fn linewidth_scully(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    linewidth_scully_with(params, p, KappaConvention::Restored)
}

pub fn linewidth_scully_with(
    params: &MaserParams,
    p: &PhotonStatistics,
    convention: KappaConvention,
) -> Result<f64> {
    if !params.is_fixed() {
        return Err(Error::UnsupportedDistribution("linewidth_scully"));
    }
    let n_mean = mean_photons(p)?;
    let scale = match convention {
        KappaConvention::Restored => params.kappa,
        KappaConvention::Literal => 1.0,
    };
    let s = (params.mean_coupling() / (4.0 * n_mean.sqrt())).sin();
    Ok(scale * (1.0 + 2.0 * params.n_th) / (4.0 * n_mean) + 4.0 * params.rate * s * s)
}

/// McGowan-Schieve linewidth averaged over τ on the shared nodes.
pub fn linewidth_mcgowan(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    let nodes = resolve_nodes(params, p)?;
    linewidth_mcgowan_with_nodes(params, &nodes, p)
}

pub fn linewidth_mcgowan_with_nodes(
    params: &MaserParams,
    nodes: &[QuadratureNode],
    p: &PhotonStatistics,
) -> Result<f64> {
    let n_mean = mean_photons(p)?;
    let mut acc = 0.0;
    for (n, &pn) in p.probabilities().iter().enumerate() {
        if pn == 0.0 {
            continue;
        }
        for node in nodes {
            acc += pn * node.weight * mcgowan_weight(params, params.g * node.tau, n);
        }
    }
    Ok(acc / n_mean)
}

/// Prefactor of the exponential-model closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpClosedPrefactor {
    /// Small-signal gain `2 r g_bar^2`; reproduces the τ-averaged main formula.
    #[default]
    SmallSignalGain,
    /// `kappa`, as originally printed.
    Literal,
}

/// `[1 + g²(3n+2) + g⁴(n+1)(4n+1)] / ([1 + 4g²(n+1)] [1 + 2g²(2n+1) + g⁴])`.
pub fn exp_closed_summand(g_bar: f64, n: usize) -> f64 {
    let g2 = g_bar * g_bar;
    let g4 = g2 * g2;
    let n = n as f64;
    let numerator = 1.0 + g2 * (3.0 * n + 2.0) + g4 * (n + 1.0) * (4.0 * n + 1.0);
    let denominator = (1.0 + 4.0 * g2 * (n + 1.0)) * (1.0 + 2.0 * g2 * (2.0 * n + 1.0) + g4);
    numerator / denominator
}

/// Closed-form linewidth for exponentially distributed interaction times at
/// `n_th = 0`.
pub fn linewidth_exp_closed(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    linewidth_exp_closed_with(params, p, ExpClosedPrefactor::SmallSignalGain)
}

pub fn linewidth_exp_closed_with(
    params: &MaserParams,
    p: &PhotonStatistics,
    prefactor: ExpClosedPrefactor,
) -> Result<f64> {
    if !params.is_exponential() {
        return Err(Error::UnsupportedDistribution("linewidth_exp_closed"));
    }
    if params.n_th != 0.0 {
        return Err(Error::InvalidParameter(
            "the exponential closed form assumes n_th = 0".into(),
        ));
    }
    let n_mean = mean_photons(p)?;
    let g_bar = params.mean_coupling();
    let trace: f64 = p
        .probabilities()
        .iter()
        .enumerate()
        .map(|(n, &pn)| pn * exp_closed_summand(g_bar, n))
        .sum();
    let scale = match prefactor {
        ExpClosedPrefactor::SmallSignalGain => 2.0 * params.rate * g_bar * g_bar,
        ExpClosedPrefactor::Literal => params.kappa,
    };
    Ok(scale * trace / n_mean)
}

/// `D = kappa (1 + 2 theta_bar^2) / (4 <n>)`.
pub fn linewidth_exp_scully(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    if !params.is_exponential() {
        return Err(Error::UnsupportedDistribution("linewidth_exp_scully"));
    }
    let n_mean = mean_photons(p)?;
    let theta_bar = params.mean_theta();
    Ok(params.kappa * (1.0 + 2.0 * theta_bar * theta_bar) / (4.0 * n_mean))
}

/// Per-photon-number integrands of the main and McGowan traces.
#[derive(Debug, Clone, PartialEq)]
pub struct FockResolvedWeights {
    pub p: Vec<f64>,
    /// `r Σ_k Δp_k {cos weight + sin weight}`; excludes `kappa n_th`.
    pub main: Vec<f64>,
    pub mcgowan: Vec<f64>,
}

impl FockResolvedWeights {
    /// Weights divided by their maximum over `n`.
    pub fn max_normalized(&self) -> (Vec<f64>, Vec<f64>) {
        let norm = |w: &[f64]| {
            let m = w.iter().copied().fold(0.0, f64::max);
            if m > 0.0 {
                w.iter().map(|x| x / m).collect()
            } else {
                w.to_vec()
            }
        };
        (norm(&self.main), norm(&self.mcgowan))
    }
}

pub fn fock_resolved_weights(
    params: &MaserParams,
    p: &PhotonStatistics,
) -> Result<FockResolvedWeights> {
    let nodes = resolve_nodes(params, p)?;
    Ok(fock_resolved_weights_with_nodes(params, &nodes, p))
}

pub fn fock_resolved_weights_with_nodes(
    params: &MaserParams,
    nodes: &[QuadratureNode],
    p: &PhotonStatistics,
) -> FockResolvedWeights {
    let n_max = p.n_max();
    let mut main = vec![0.0; n_max + 1];
    let mut mcgowan = vec![0.0; n_max + 1];
    for n in 0..=n_max {
        for node in nodes {
            let g_tau = params.g * node.tau;
            main[n] += node.weight * params.rate * (cos_weight(g_tau, n) + sin_weight(g_tau, n));
            mcgowan[n] += node.weight * mcgowan_weight(params, g_tau, n);
        }
    }
    FockResolvedWeights {
        p: p.probabilities().to_vec(),
        main,
        mcgowan,
    }
}

/// `D <n> / kappa` and the quadratic reference `(theta^2 + 1 + 2 n_th) / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchawlowTownes {
    pub ratio: f64,
    pub reference: f64,
}

pub fn schawlow_townes_ratio(params: &MaserParams, p: &PhotonStatistics, d: f64) -> SchawlowTownes {
    let theta = params.mean_theta();
    SchawlowTownes {
        ratio: d * p.mean() / params.kappa,
        reference: schawlow_townes_reference(theta, params.n_th),
    }
}

pub fn schawlow_townes_reference(theta: f64, n_th: f64) -> f64 {
    (theta * theta + 1.0 + 2.0 * n_th) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::InteractionTimeDistribution;
    use crate::steady_state::{steady_state, steady_state_auto, steady_state_exp};
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn thermal_linewidth_is_kappa() {
        for n_th in [0.01, 0.1, 1.0] {
            let params = MaserParams::fixed(2.5, n_th, 0.0, 0.3).unwrap();
            let p = steady_state_auto(&params).unwrap();
            let d = linewidth_main(&params, &p).unwrap();
            assert!(rel(d.total, 2.5) < 1e-12, "{n_th}: {}", d.total);
            assert!(rel(linewidth_from_lindblad(&params, &p).unwrap(), 2.5) < 1e-12);
        }
    }

    #[test]
    fn vacuum_is_a_hard_error() {
        let params = MaserParams::fixed(1.0, 0.0, 0.0, 0.3).unwrap();
        let p = steady_state(&params, 10).unwrap();
        assert_eq!(linewidth_main(&params, &p), Err(Error::Vacuum));
        assert_eq!(linewidth_from_lindblad(&params, &p), Err(Error::Vacuum));
        assert_eq!(linewidth_scully(&params, &p), Err(Error::Vacuum));
        assert_eq!(linewidth_mcgowan(&params, &p), Err(Error::Vacuum));
    }

    #[test]
    fn breakdown_is_additive_and_non_negative() {
        for theta in [0.5 * PI, 1.3 * PI, 2.05 * PI, 3.7 * PI] {
            let params = MaserParams::fixed_theta(1.0, 0.01, 50.0, theta).unwrap();
            let p = steady_state_auto(&params).unwrap();
            let d = linewidth_main(&params, &p).unwrap();
            assert!(d.thermal >= 0.0 && d.cos >= 0.0 && d.sin >= 0.0);
            assert!(rel(d.thermal + d.cos + d.sin, d.total) < 1e-12);
        }
    }

    #[test]
    fn weights_at_zero_photons() {
        for g_tau in [0.2, 0.47, 1.3] {
            assert_eq!(cos_weight(g_tau, 0), 0.0);
            assert!((sin_weight(g_tau, 0) - g_tau.sin().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn cos_weight_at_multiples_of_pi() {
        // g tau sqrt(n+1) = k π: at n = 0 both phases are multiples of π
        for k in 1..5 {
            assert_eq!(cos_weight(k as f64 * PI, 0), 0.0);
        }
        // n = 3, sqrt(4) = 2: g tau = π/2 puts sqrt(n+1) at π, sqrt(n) off-grid
        let g_tau = PI / 2.0;
        let expected = 3.0 * (-1.0 - (g_tau * 3f64.sqrt()).cos()).powi(2);
        assert!((cos_weight(g_tau, 3) - expected).abs() < 1e-14);
    }

    #[test]
    fn lindblad_trace_matches_main_formula() {
        for (rate, n_th, theta) in [(50.0, 0.01, 2.0 * PI), (200.0, 0.1, 2.1 * PI), (20.0, 0.5, 0.8)] {
            let params = MaserParams::fixed_theta(1.0, n_th, rate, theta).unwrap();
            let p = steady_state_auto(&params).unwrap();
            let main = linewidth_main(&params, &p).unwrap().total;
            let trace = linewidth_from_lindblad(&params, &p).unwrap();
            assert!(rel(trace, main) < 1e-10, "{trace} vs {main}");
        }
    }

    #[test]
    fn identity_shift_of_cosine_operator_is_invisible() {
        let params = MaserParams::fixed_theta(1.0, 0.01, 50.0, 1.7 * PI).unwrap();
        let p = steady_state_auto(&params).unwrap();
        let nodes = resolve_nodes(&params, &p).unwrap();
        let base = linewidth_from_lindblad_with(&params, &nodes, &p, 0.0).unwrap();
        for c in [1.0, -3.0] {
            let shifted = linewidth_from_lindblad_with(&params, &nodes, &p, c).unwrap();
            assert!(rel(shifted, base) < 1e-12);
        }
    }

    #[test]
    fn scully_limits_and_value() {
        let params = MaserParams::fixed(1.0, 0.0, 100.0, PI).unwrap();
        let mut w = vec![0.0; 60];
        w[25] = 1.0;
        let p = PhotonStatistics::from_weights(w).unwrap();
        let d = linewidth_scully(&params, &p).unwrap();
        let expected = 0.01 + 400.0 * (PI / 20.0).sin().powi(2);
        assert!((d - expected).abs() < 1e-12);
        assert!((d - 9.799).abs() < 1e-3);

        let small = MaserParams::fixed(1.0, 0.3, 100.0, 1e-9).unwrap();
        let d = linewidth_scully(&small, &p).unwrap();
        assert!(rel(d, 1.6 / 100.0) < 1e-9);

        let literal = linewidth_scully_with(
            &MaserParams::fixed(2.0, 0.0, 100.0, 1e-9).unwrap(),
            &p,
            KappaConvention::Literal,
        )
        .unwrap();
        assert!(rel(literal, 0.01) < 1e-9);
    }

    #[test]
    fn scully_rejects_distributed_times() {
        let params = MaserParams::exponential(1.0, 0.0, 10.0, 0.3).unwrap();
        let p = steady_state_auto(&params).unwrap();
        assert!(linewidth_scully(&params, &p).is_err());
    }

    #[test]
    fn exp_closed_summand_limits() {
        assert!((exp_closed_summand(1e-9, 7) - 1.0).abs() < 1e-12);
        for g in [0.1, 0.3, 1.0] {
            assert!((exp_closed_summand(g, 0) - 1.0 / (1.0 + 4.0 * g * g)).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_closed_literal_prefactor_small_coupling() {
        let params = MaserParams::exponential_theta(1.0, 0.0, 1e-4, 0.5).unwrap();
        let p = steady_state_exp(&params, 200).unwrap();
        let d = linewidth_exp_closed_with(&params, &p, ExpClosedPrefactor::Literal).unwrap();
        assert!(rel(d * p.mean(), 1.0) < 1e-5);
    }

    #[test]
    fn exp_closed_matches_quadrature_average_of_main() {
        let params = MaserParams::exponential_theta(1.0, 0.0, 0.3, 2.0).unwrap();
        let p = steady_state_auto(&params).unwrap();
        let closed = linewidth_exp_closed(&params, &p).unwrap();
        let quad = linewidth_main(&params, &p).unwrap().total;
        assert!(rel(closed, quad) < 1e-6, "{closed} vs {quad}");
    }

    #[test]
    fn exp_scully_regimes() {
        let params = MaserParams::exponential_theta(1.0, 0.0, 0.3, 0.0).unwrap();
        let p = PhotonStatistics::from_weights(vec![0.5, 0.5, 0.0]).unwrap();
        assert!(rel(linewidth_exp_scully(&params, &p).unwrap(), 0.25 / 0.5) < 1e-15);

        let above = MaserParams::exponential_theta(1.0, 0.0, 0.3, 3.0).unwrap();
        let p = steady_state_auto(&above).unwrap();
        let approx = linewidth_exp_scully(&above, &p).unwrap();
        let closed = linewidth_exp_closed(&above, &p).unwrap();
        assert!(rel(approx, closed) < 0.2);

        let below = MaserParams::exponential_theta(1.0, 0.0, 0.3, 0.2).unwrap();
        let p = steady_state_auto(&below).unwrap();
        let approx = linewidth_exp_scully(&below, &p).unwrap();
        let closed = linewidth_exp_closed(&below, &p).unwrap();
        assert!(rel(approx, closed) > 0.2);
    }

    #[test]
    fn fock_weights_reproduce_main() {
        let params = MaserParams::fixed_theta(1.0, 0.1, 200.0, 2.1 * PI).unwrap();
        let p = steady_state_auto(&params).unwrap();
        let w = fock_resolved_weights(&params, &p).unwrap();
        let d = linewidth_main(&params, &p).unwrap();
        let trace: f64 = w.p.iter().zip(&w.main).map(|(p, w)| p * w).sum();
        assert!(rel(trace, d.total * d.n_mean - params.kappa * params.n_th) < 1e-12);
        let g_tau = params.mean_coupling();
        assert!((w.main[0] - params.rate * g_tau.sin().powi(2)).abs() < 1e-12);
        let mcg: f64 = w.p.iter().zip(&w.mcgowan).map(|(p, w)| p * w).sum();
        assert!(rel(mcg / d.n_mean, linewidth_mcgowan(&params, &p).unwrap()) < 1e-12);
        let (a, b) = w.max_normalized();
        assert_eq!(a.iter().copied().fold(0.0, f64::max), 1.0);
        assert_eq!(b.iter().copied().fold(0.0, f64::max), 1.0);
    }

    #[test]
    fn schawlow_townes_thermal_and_reference() {
        let params = MaserParams::fixed(1.0, 0.1, 0.0, 0.3).unwrap();
        let p = steady_state_auto(&params).unwrap();
        let d = linewidth_main(&params, &p).unwrap().total;
        let st = schawlow_townes_ratio(&params, &p, d);
        assert!((st.ratio - 0.1).abs() < 1e-12);
        assert_eq!(schawlow_townes_reference(0.0, 0.0), 0.25);
    }

    #[test]
    fn discrete_distribution_sums_nodes() {
        let nodes = vec![
            QuadratureNode { tau: 0.4, weight: 0.3 },
            QuadratureNode { tau: 0.6, weight: 0.7 },
        ];
        let params = MaserParams::new(
            1.0,
            0.05,
            30.0,
            1.0,
            InteractionTimeDistribution::Discrete { nodes: nodes.clone() },
        )
        .unwrap();
        let p = steady_state_auto(&params).unwrap();
        let d = linewidth_main(&params, &p).unwrap();
        let mut manual = params.kappa * params.n_th;
        for (n, &pn) in p.probabilities().iter().enumerate() {
            for node in &nodes {
                manual += pn * node.weight * params.rate * (cos_weight(node.tau, n) + sin_weight(node.tau, n));
            }
        }
        assert!(rel(d.total, manual / d.n_mean) < 1e-12);
        assert!(rel(linewidth_from_lindblad(&params, &p).unwrap(), d.total) < 1e-10);
    }
}
