//! Averages over the interaction-time measure.
//!
//! Two independent paths are kept: closed-form trigonometric averages under
//! the exponential measure, and Gauss-Laguerre nodes for the generic
//! discretized sum.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::params::{InteractionTimeDistribution, QuadratureNode};

/// Node counts tried, in order, when a downstream quantity is converged.
pub const NODE_LADDER: [usize; 7] = [8, 16, 32, 64, 128, 256, 512];

/// Relative change below which the node ladder stops.
pub const NODE_CONVERGENCE: f64 = 1e-8;

/// Product of two trigonometric factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    CosCos,
    SinSin,
    SinCos,
}

impl TrigKind {
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            TrigKind::CosCos => a.cos() * b.cos(),
            TrigKind::SinSin => a.sin() * b.sin(),
            TrigKind::SinCos => a.sin() * b.cos(),
        }
    }
}

/// `∫_0^∞ e^{-t} trig(a t) trig(b t) dt` in closed form.
pub fn exp_average_trig(kind: TrigKind, a: f64, b: f64) -> f64 {
    // ∫ e^{-t} cos(c t) = 1 / (1 + c²), ∫ e^{-t} sin(c t) = c / (1 + c²)
    let lorentz = |c: f64| 1.0 / (1.0 + c * c);
    let (sum, diff) = (a + b, a - b);
    match kind {
        TrigKind::CosCos => 0.5 * (lorentz(diff) + lorentz(sum)),
        TrigKind::SinSin => 0.5 * (lorentz(diff) - lorentz(sum)),
        TrigKind::SinCos => 0.5 * (sum * lorentz(sum) + diff * lorentz(diff)),
    }
}

/// Gauss-Laguerre rule for the unit-mean measure `e^{-t} dt`.
///
/// Nodes and weights come from the symmetric Jacobi matrix of the Laguerre
/// recurrence (diagonal `2k + 1`, off-diagonal `k`).
pub fn gauss_laguerre(n_nodes: usize) -> Result<Vec<QuadratureNode>> {
    if n_nodes == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    if n_nodes == 1 {
        return Ok(vec![QuadratureNode { tau: 1.0, weight: 1.0 }]);
    }
    let jacobi = Mat::<f64>::from_fn(n_nodes, n_nodes, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i == j + 1 || j == i + 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let evd = jacobi
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Gauss-Laguerre eigenproblem: {e:?}")))?;
    let values = evd.S();
    let vectors = evd.U();
    let mut nodes: Vec<QuadratureNode> = (0..n_nodes)
        .map(|k| {
            let v0 = vectors[(0, k)];
            QuadratureNode {
                tau: values[k],
                weight: v0 * v0,
            }
        })
        .collect();
    if nodes.iter().any(|n| !n.tau.is_finite() || n.tau <= 0.0 || !n.weight.is_finite()) {
        return Err(Error::Numerical("Gauss-Laguerre nodes did not converge".into()));
    }
    nodes.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    // Drop weights that underflow; they carry no information.
    nodes.retain(|n| n.weight > 0.0);
    let total: f64 = nodes.iter().map(|n| n.weight).sum();
    for n in &mut nodes {
        n.weight /= total;
    }
    Ok(nodes)
}

/// Discretizes a distribution: point mass, Gauss-Laguerre, or pass-through.
pub fn quadrature_nodes(
    dist: &InteractionTimeDistribution,
    n_nodes: usize,
) -> Result<InteractionTimeDistribution> {
    if n_nodes == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    Ok(InteractionTimeDistribution::Discrete {
        nodes: distribution_nodes(dist, n_nodes)?,
    })
}

/// The node list behind [`quadrature_nodes`].
pub fn distribution_nodes(
    dist: &InteractionTimeDistribution,
    n_nodes: usize,
) -> Result<Vec<QuadratureNode>> {
    match dist {
        InteractionTimeDistribution::Fixed { tau } => {
            Ok(vec![QuadratureNode { tau: *tau, weight: 1.0 }])
        }
        InteractionTimeDistribution::Exponential { tau_bar } => Ok(gauss_laguerre(n_nodes)?
            .into_iter()
            .map(|n| QuadratureNode {
                tau: n.tau * tau_bar,
                weight: n.weight,
            })
            .collect()),
        InteractionTimeDistribution::Discrete { nodes } => Ok(nodes.clone()),
    }
}

/// Evaluates `f` on successively finer Gauss-Laguerre rules until two
/// consecutive values agree to [`NODE_CONVERGENCE`]. Non-exponential
/// distributions are evaluated once on their own nodes.
pub fn converge_over_nodes<F>(
    dist: &InteractionTimeDistribution,
    mut f: F,
) -> Result<(f64, Vec<QuadratureNode>)>
where
    F: FnMut(&[QuadratureNode]) -> Result<f64>,
{
    if !matches!(dist, InteractionTimeDistribution::Exponential { .. }) {
        let nodes = distribution_nodes(dist, 1)?;
        let value = f(&nodes)?;
        return Ok((value, nodes));
    }
    let mut previous: Option<f64> = None;
    for &count in NODE_LADDER.iter() {
        let nodes = distribution_nodes(dist, count)?;
        let value = f(&nodes)?;
        if let Some(prev) = previous {
            if (value - prev).abs() <= NODE_CONVERGENCE * value.abs().max(f64::MIN_POSITIVE) {
                return Ok((value, nodes));
            }
        }
        previous = Some(value);
    }
    Err(Error::Numerical(format!(
        "interaction-time average not converged with {} nodes",
        NODE_LADDER[NODE_LADDER.len() - 1]
    )))
}

/// `<trig(g tau a) trig(g tau b)>` over the interaction-time measure.
///
/// Exponential measures use [`exp_average_trig`]; everything else is summed
/// over its nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum TauAverage {
    Nodes(Vec<QuadratureNode>),
    Exponential { tau_bar: f64 },
}

impl TauAverage {
    pub fn new(dist: &InteractionTimeDistribution) -> Self {
        match dist {
            InteractionTimeDistribution::Exponential { tau_bar } => {
                TauAverage::Exponential { tau_bar: *tau_bar }
            }
            InteractionTimeDistribution::Fixed { tau } => {
                TauAverage::Nodes(vec![QuadratureNode { tau: *tau, weight: 1.0 }])
            }
            InteractionTimeDistribution::Discrete { nodes } => TauAverage::Nodes(nodes.clone()),
        }
    }

    pub fn trig_product(&self, kind: TrigKind, g: f64, a: f64, b: f64) -> f64 {
        match self {
            TauAverage::Exponential { tau_bar } => {
                exp_average_trig(kind, g * tau_bar * a, g * tau_bar * b)
            }
            TauAverage::Nodes(nodes) => nodes
                .iter()
                .map(|n| n.weight * kind.eval(g * n.tau * a, g * n.tau * b))
                .sum(),
        }
    }
}
