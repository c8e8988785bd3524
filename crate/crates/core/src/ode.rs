//! Adaptive Dormand-Prince 5(4) integration of `dy/dt = f(y)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step; the caller sets it from the stiffness scale.
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates an autonomous system from `t_grid[0]` and returns the state at every grid time.
pub fn integrate<F>(f: F, y0: &[f64], t_grid: &[f64], control: &StepControl) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64], &mut [f64]),
{
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter("time grid must be finite and ascending".into()));
    }
    let dim = y0.len();
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(y0.to_vec());
    let mut y = y0.to_vec();
    let mut t = t_grid[0];
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    f(&y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], control);
    let mut steps = 0usize;

    for &target in &t_grid[1..] {
        while t < target {
            steps += 1;
            if steps > control.max_steps {
                return Err(Error::Integration {
                    reached: t,
                    reason: "step budget exhausted".into(),
                });
            }
            let last = target - t <= h;
            let h_try = if last { target - t } else { h };
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += h_try * A[s][j] * kj[i];
                    }
                    stage[i] = acc;
                }
                f(&stage, &mut k[s]);
            }
            let mut err = 0.0f64;
            for i in 0..dim {
                let mut y5 = y[i];
                let mut e = 0.0;
                for s in 0..7 {
                    y5 += h_try * B5[s] * k[s][i];
                    e += h_try * (B5[s] - B4[s]) * k[s][i];
                }
                y_new[i] = y5;
                let scale = control.atol + control.rtol * y[i].abs().max(y5.abs());
                err = err.max((e / scale).abs());
            }
            if !err.is_finite() {
                return Err(Error::Integration {
                    reached: t,
                    reason: "non-finite state".into(),
                });
            }
            if err <= 1.0 {
                t = if last { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                // first-same-as-last: the last stage is f(y_new)
                k.swap(0, 6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                h = (h_try * factor).min(control.max_step);
            }
            if h < control.min_step && t < target {
                return Err(Error::Integration {
                    reached: t,
                    reason: format!("step size underflow ({h:e})"),
                });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step(y: &[f64], dy: &[f64], control: &StepControl) -> f64 {
    let y_norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d_norm = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let h = if d_norm > 0.0 && y_norm > 0.0 {
        0.01 * y_norm / d_norm
    } else {
        1e-3
    };
    h.min(control.max_step).max(control.min_step)
}
