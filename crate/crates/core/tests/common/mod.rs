//! Dense density-matrix helpers shared by the integration tests.
//!
//! Everything here is built from explicit matrices, not from the crate's
//! pair-sum assembly.
#![allow(dead_code)]

use micromaser::quadrature::gauss_laguerre;
use micromaser::{InteractionTimeDistribution, MaserParams, QuadratureNode};

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(dim: usize) -> Dense {
    vec![vec![0.0; dim]; dim]
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let dim = a.len();
    let mut c = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..dim {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn transpose(a: &Dense) -> Dense {
    let dim = a.len();
    let mut t = zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            t[j][i] = a[i][j];
        }
    }
    t
}

/// `Σ_L L P L^T - (L^T L P + P L^T L) / 2` for real jump operators.
pub struct Liouvillian {
    ops: Vec<(Dense, Dense, Dense)>,
}

impl Liouvillian {
    pub fn new(ops: Vec<Dense>) -> Self {
        let ops = ops
            .into_iter()
            .map(|l| {
                let lt = transpose(&l);
                let ltl = matmul(&lt, &l);
                (l, lt, ltl)
            })
            .collect();
        Self { ops }
    }

    pub fn apply(&self, p: &Dense) -> Dense {
        let dim = p.len();
        let mut out = zeros(dim);
        for (l, lt, ltl) in &self.ops {
            let jump = matmul(&matmul(l, p), lt);
            let left = matmul(ltl, p);
            let right = matmul(p, ltl);
            for i in 0..dim {
                for j in 0..dim {
                    out[i][j] += jump[i][j] - 0.5 * (left[i][j] + right[i][j]);
                }
            }
        }
        out
    }
}

pub fn jump_matrices(params: &MaserParams, nodes: &[QuadratureNode], n_max: usize) -> Vec<Dense> {
    let dim = n_max + 1;
    let mut lower = zeros(dim);
    let mut raise = zeros(dim);
    for n in 0..n_max {
        lower[n][n + 1] = ((n + 1) as f64).sqrt();
        raise[n + 1][n] = ((n + 1) as f64).sqrt();
    }
    let scale = |m: &Dense, s: f64| -> Dense { m.iter().map(|row| row.iter().map(|x| x * s).collect()).collect() };
    let mut ops = vec![scale(&lower, (params.kappa * (1.0 + params.n_th)).sqrt())];
    if params.n_th > 0.0 {
        ops.push(scale(&raise, (params.kappa * params.n_th).sqrt()));
    }
    for node in nodes {
        let g_tau = params.g * node.tau;
        let amp = (params.rate * node.weight).sqrt();
        let mut c = zeros(dim);
        let mut s = zeros(dim);
        for m in 0..dim {
            let phi = ((m + 1) as f64).sqrt();
            c[m][m] = amp * (g_tau * phi).cos();
            if m < n_max {
                // sqrt(r dp) g tau a^dag sinc(g tau phi)
                s[m + 1][m] = amp * g_tau * raise[m + 1][m] * (g_tau * phi).sin() / (g_tau * phi);
            }
        }
        ops.push(c);
        ops.push(s);
    }
    ops
}

pub fn fixed(rate: f64, n_th: f64, theta: f64) -> MaserParams {
    if rate == 0.0 {
        MaserParams::fixed(1.0, n_th, 0.0, theta).unwrap()
    } else {
        MaserParams::fixed_theta(1.0, n_th, rate, theta).unwrap()
    }
}

pub fn fixed_nodes(params: &MaserParams) -> Vec<QuadratureNode> {
    match &params.tau_dist {
        InteractionTimeDistribution::Fixed { tau } => vec![QuadratureNode { tau: *tau, weight: 1.0 }],
        InteractionTimeDistribution::Discrete { nodes } => nodes.clone(),
        InteractionTimeDistribution::Exponential { tau_bar } => gauss_laguerre(256)
            .unwrap()
            .into_iter()
            .map(|q| QuadratureNode { tau: q.tau * tau_bar, weight: q.weight })
            .collect(),
    }
}

pub fn rk4(l: &Liouvillian, p: &Dense, dt: f64) -> Dense {
    let dim = p.len();
    let axpy = |a: &Dense, b: &Dense, s: f64| -> Dense {
        (0..dim).map(|i| (0..dim).map(|j| a[i][j] + s * b[i][j]).collect()).collect()
    };
    let k1 = l.apply(p);
    let k2 = l.apply(&axpy(p, &k1, dt / 2.0));
    let k3 = l.apply(&axpy(p, &k2, dt / 2.0));
    let k4 = l.apply(&axpy(p, &k3, dt));
    (0..dim)
        .map(|i| (0..dim).map(|j| p[i][j] + dt / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j])).collect())
        .collect()
}

