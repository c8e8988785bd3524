//! Dense density-matrix oracle for the sideband generator and the steady state.

mod common;

use common::*;
use micromaser::quadrature::TauAverage;
use micromaser::regression::{build_sideband_generator, build_sideband_generator_with};
use micromaser::steady_state::steady_state;
use micromaser::uniform::{build_uniform_lindblad, UniformOrders};
use micromaser::{MaserParams, QuadratureNode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn sideband_sector_is_closed_under_evolution() {
    let n_max = 40;
    let params = MaserParams::fixed_theta(1.0, 0.1, 20.0, 1.3 * PI).unwrap();
    let liouvillian = Liouvillian::new(jump_matrices(&params, &fixed_nodes(&params), n_max));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dt = 0.01;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let w: Vec<f64> = (0..=n_max).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum();
        let mut p = zeros(n_max + 1);
        // P(0) = a rho for diagonal rho
        for n in 0..n_max {
            p[n][n + 1] = ((n + 1) as f64).sqrt() * w[n + 1] / total;
        }
        let mut t = 0.0;
        while t < 5.0 - 1e-12 {
            p = rk4(&liouvillian, &p, dt);
            t += dt;
            if ((t / dt).round() as usize) % 100 == 0 {
                for (i, row) in p.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        if j != i + 1 {
                            worst = worst.max(x.abs());
                        }
                    }
                }
            }
        }
    }
    assert!(worst < 1e-12, "off-sector mass {worst:e}");
}

fn check_generator(params: &MaserParams, gen: &micromaser::regression::SidebandGenerator, n_max: usize, tol: f64) {
    let liouvillian = Liouvillian::new(jump_matrices(params, &fixed_nodes(params), n_max));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let v: Vec<f64> = (0..n_max).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mut p = zeros(n_max + 1);
        for n in 0..n_max {
            p[n][n + 1] = v[n];
        }
        let lp = liouvillian.apply(&p);
        let mut gv = vec![0.0; n_max];
        gen.apply(&v, &mut gv);
        let scale = gv.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (i, row) in lp.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if j == i + 1 {
                    assert!((x - gv[i]).abs() <= tol * scale, "({i}, {j}): {x} vs {}", gv[i]);
                } else {
                    assert_eq!(*x, 0.0, "({i}, {j}) leaves the sector");
                }
            }
        }
    }
}

#[test]
fn sideband_generator_matches_dense_master_equation() {
    let n_max = 40;
    for (rate, n_th, theta) in [(0.0, 0.0, 0.5), (0.0, 0.7, 0.5), (20.0, 0.1, 1.3 * PI), (50.0, 0.01, 2.0 * PI)] {
        let params = fixed(rate, n_th, theta);
        let gen = build_sideband_generator(&params, n_max).unwrap();
        check_generator(&params, &gen, n_max, 1e-13);
    }
    let nodes = vec![
        QuadratureNode { tau: 0.2, weight: 0.5 },
        QuadratureNode { tau: 0.9, weight: 0.5 },
    ];
    let discrete = MaserParams::new(1.0, 0.2, 30.0, 1.7, micromaser::InteractionTimeDistribution::Discrete { nodes }).unwrap();
    check_generator(&discrete, &build_sideband_generator(&discrete, n_max).unwrap(), n_max, 1e-13);
}

#[test]
fn exponential_generator_closed_form_matches_quadrature() {
    let n_max = 40;
    let params = MaserParams::exponential_theta(1.0, 0.0, 0.3, 1.0).unwrap();
    let closed = build_sideband_generator(&params, n_max).unwrap();
    check_generator(&params, &closed, n_max, 1e-10);
    let nodes = TauAverage::Nodes(fixed_nodes(&params));
    let quad = build_sideband_generator_with(&params, n_max, &nodes).unwrap();
    for n in 0..n_max {
        assert!((closed.diag[n] - quad.diag[n]).abs() < 1e-10 * closed.diag[n].abs().max(1.0));
        assert!((closed.sub[n] - quad.sub[n]).abs() < 1e-10 * closed.sub[n].abs().max(1.0));
    }
}

#[test]
fn steady_state_is_a_fixed_point_of_the_master_equation() {
    let n_max = 40;
    for (rate, n_th, theta) in [(0.0, 1.0, 0.3), (5.0, 0.1, 0.9 * PI), (10.0, 0.05, 2.0 * PI)] {
        let params = fixed(rate, n_th, theta);
        let p = steady_state(&params, n_max).unwrap();
        let liouvillian = Liouvillian::new(jump_matrices(&params, &fixed_nodes(&params), n_max));
        let mut rho = zeros(n_max + 1);
        for n in 0..=n_max {
            rho[n][n] = p.probabilities()[n];
        }
        let rate_of_change = liouvillian.apply(&rho);
        let worst = rate_of_change.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(worst < 1e-10 * params.kappa, "{rate} {n_th}: {worst:e}");
    }
}

#[test]
fn uniform_model_preserves_trace_and_positivity() {
    let n_max = 30;
    let params = MaserParams::exponential_theta(1.0, 0.0, 0.3, 1.0).unwrap();
    let set = build_uniform_lindblad(&params, UniformOrders::paired(3), n_max).unwrap();
    let ops: Vec<Dense> = set
        .jump_operators()
        .iter()
        .map(|op| {
            let mut m = zeros(n_max + 1);
            for n in 0..=n_max {
                if let Some((target, amp)) = op.apply((n, 1.0)) {
                    if target <= n_max {
                        m[target][n] = amp;
                    }
                }
            }
            m
        })
        .collect();
    let liouvillian = Liouvillian::new(ops);
    let mut rho = zeros(n_max + 1);
    rho[0][0] = 1.0;
    let dt = 0.01;
    for _ in 0..1000 {
        rho = rk4(&liouvillian, &rho, dt);
    }
    let trace: f64 = (0..=n_max).map(|n| rho[n][n]).sum();
    assert!((trace - 1.0).abs() < 1e-12, "{trace}");
    // long-time populations approach the truncated steady state
    let p = set.steady_state().unwrap();
    for n in 0..=n_max {
        assert!(rho[n][n] > -1e-14);
        assert!((rho[n][n] - p.probabilities()[n]).abs() < 1e-3, "{n}");
    }
}
