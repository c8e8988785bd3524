//! Quantum regression on the sideband sector `v_n = <n|P|n+1>`.
//!
//! The skew operator `P(t)` starts from `a rho_ss` and evolves under the
//! master equation; the field correlation is `g(t) = tr(a^dag P(t)) =
//! Σ sqrt(n+1) v_n(t)`. On this sector the master equation is a real
//! tridiagonal matrix, assembled here from the matrix elements of the jump
//! operators.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::solvers::Solve;
use faer::diag::Diag;
use faer::{Mat, Par};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{integrate, StepControl};
use crate::params::MaserParams;
use crate::quadrature::{TauAverage, TrigKind};
use crate::steady_state::PhotonStatistics;

pub const EIGEN_RESIDUAL: f64 = 1e-8;
pub const SUM_RULE_TOLERANCE: f64 = 1e-10;

/// Tridiagonal generator `dv/dt = G v` on `v_0..v_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandGenerator {
    /// Coefficient of `v_{n-1}` in row `n`; `sub[0] = 0`.
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// Coefficient of `v_{n+1}` in row `n`; `sup[N-1] = 0`.
    pub sup: Vec<f64>,
    n_max: usize,
}

impl SidebandGenerator {
    /// Assembles the generator from pair sums of jump-operator amplitudes on
    /// the basis `|0>..|n_max>`.
    ///
    /// Each closure returns `Σ_L amp_L(m1) amp_L(m2)` over one family:
    /// `diagonal` for `L|m> ∝ |m>`, `raising` for `L|m> ∝ |m+1>` and
    /// `lowering` for `L|m> ∝ |m-1>`. Raising out of `|n_max>` is dropped.
    pub fn from_pair_sums(
        n_max: usize,
        diagonal: impl Fn(usize, usize) -> f64,
        raising: impl Fn(usize, usize) -> f64,
        lowering: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::BasisTooSmall(n_max));
        }
        let loss = |m: usize| {
            let mut x = diagonal(m, m);
            if m < n_max {
                x += raising(m, m);
            }
            if m > 0 {
                x += lowering(m, m);
            }
            x
        };
        let out: Vec<f64> = (0..=n_max).map(loss).collect();
        let dim = n_max;
        let mut sub = vec![0.0; dim];
        let mut diag = vec![0.0; dim];
        let mut sup = vec![0.0; dim];
        for n in 0..dim {
            diag[n] = diagonal(n, n + 1) - 0.5 * (out[n] + out[n + 1]);
            if n > 0 {
                sub[n] = raising(n - 1, n);
            }
            if n + 1 < dim {
                sup[n] = lowering(n + 1, n + 2);
            }
        }
        Ok(Self {
            sub,
            diag,
            sup,
            n_max,
        })
    }

    /// Highest Fock index of the underlying basis; the sector has `n_max` entries.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `out = G v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let dim = self.dim();
        for n in 0..dim {
            let mut acc = self.diag[n] * v[n];
            if n > 0 {
                acc += self.sub[n] * v[n - 1];
            }
            if n + 1 < dim {
                acc += self.sup[n] * v[n + 1];
            }
            out[n] = acc;
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.dim())
            .map(|n| self.diag[n].abs() + self.sub[n].abs() + self.sup[n].abs())
            .fold(0.0, f64::max)
    }

    /// Diagonal similarity `s` that gives `S^-1 G S` off-diagonal pairs of
    /// equal magnitude. Pairs with a zero entry are left unscaled.
    pub fn balancing_scale(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut log_s = vec![0.0f64; dim];
        for n in 1..dim {
            let (lo, hi) = (self.sub[n].abs(), self.sup[n - 1].abs());
            let step = if lo > 0.0 && hi > 0.0 { 0.5 * (lo / hi).ln() } else { 0.0 };
            log_s[n] = log_s[n - 1] + step;
        }
        let top = log_s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        log_s.iter().map(|l| (l - top).max(-600.0).exp()).collect()
    }

    pub fn dense(&self) -> Mat<f64> {
        let dim = self.dim();
        Mat::from_fn(dim, dim, |i, j| {
            if i == j {
                self.diag[i]
            } else if j + 1 == i {
                self.sub[i]
            } else if i + 1 == j {
                self.sup[i]
            } else {
                0.0
            }
        })
    }
}

/// Generator of the full master equation on `|0>..|n_max>`.
///
/// Exponential interaction times use closed-form trig averages per entry;
/// other measures sum over their nodes.
pub fn build_sideband_generator(params: &MaserParams, n_max: usize) -> Result<SidebandGenerator> {
    params.validate()?;
    build_sideband_generator_with(params, n_max, &TauAverage::new(&params.tau_dist))
}

pub fn build_sideband_generator_with(
    params: &MaserParams,
    n_max: usize,
    average: &TauAverage,
) -> Result<SidebandGenerator> {
    let phi = |m: usize| ((m + 1) as f64).sqrt();
    let (r, g) = (params.rate, params.g);
    let pump = |kind: TrigKind, m1: usize, m2: usize| {
        if r == 0.0 {
            0.0
        } else {
            r * average.trig_product(kind, g, phi(m1), phi(m2))
        }
    };
    let emission = params.kappa * (1.0 + params.n_th);
    let absorption = params.kappa * params.n_th;
    SidebandGenerator::from_pair_sums(
        n_max,
        |m1, m2| pump(TrigKind::CosCos, m1, m2),
        |m1, m2| pump(TrigKind::SinSin, m1, m2) + absorption * phi(m1) * phi(m2),
        |m1, m2| emission * ((m1 * m2) as f64).sqrt(),
    )
}

/// `v_n = sqrt(n+1) p_{n+1}`, the sideband of `a rho`.
pub fn initial_sideband(p: &PhotonStatistics) -> Vec<f64> {
    let probs = p.probabilities();
    (0..p.n_max())
        .map(|n| ((n + 1) as f64).sqrt() * probs[n + 1])
        .collect()
}

/// `tr(a^dag P) = Σ sqrt(n+1) v_n`.
pub fn field_amplitude(v: &[f64]) -> f64 {
    v.iter()
        .enumerate()
        .map(|(n, x)| ((n + 1) as f64).sqrt() * x)
        .sum()
}

/// `g(t)` on an ascending grid starting at zero.
pub fn correlate(gen: &SidebandGenerator, v0: &[f64], t_grid: &[f64]) -> Result<Vec<f64>> {
    correlate_with(gen, v0, t_grid, 1e-10)
}

pub fn correlate_with(
    gen: &SidebandGenerator,
    v0: &[f64],
    t_grid: &[f64],
    rtol: f64,
) -> Result<Vec<f64>> {
    if v0.len() != gen.dim() {
        return Err(Error::InvalidParameter(format!(
            "sideband of length {} for a generator of dimension {}",
            v0.len(),
            gen.dim()
        )));
    }
    if t_grid.first().is_some_and(|&t| t != 0.0) {
        return Err(Error::InvalidParameter("time grid must start at zero".into()));
    }
    let scale = v0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let radius = gen.gershgorin_radius();
    let control = StepControl {
        rtol,
        atol: 1e-6 * rtol * scale.max(f64::MIN_POSITIVE),
        max_step: if radius > 0.0 { 3.0 / radius } else { f64::INFINITY },
        ..StepControl::default()
    };
    let states = integrate(|v, dv| gen.apply(v, dv), v0, t_grid, &control)?;
    Ok(states.iter().map(|v| field_amplitude(v)).collect())
}

/// `D = -2 g'(0) / g(0)` from one application of the generator.
pub fn linewidth_from_slope(gen: &SidebandGenerator, v0: &[f64]) -> Result<f64> {
    let g0 = field_amplitude(v0);
    if !(g0 > 0.0) {
        return Err(Error::Vacuum);
    }
    let mut gv = vec![0.0; v0.len()];
    gen.apply(v0, &mut gv);
    Ok(-2.0 * field_amplitude(&gv) / g0)
}

/// Regression linewidth for `params` with steady state `p`.
pub fn regression_linewidth(params: &MaserParams, p: &PhotonStatistics) -> Result<f64> {
    let gen = build_sideband_generator(params, p.n_max())?;
    linewidth_from_slope(&gen, &initial_sideband(p))
}

/// `g(t) = Σ_j g_j exp(-mu_j t / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Decay rates `mu_j = -2 lambda_j`.
    pub mu: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub n_mean: f64,
}

impl SpectralDecomposition {
    /// Weighted mean `Σ g_j mu_j / Σ g_j`; the initial-slope linewidth.
    pub fn mean_rate(&self) -> f64 {
        let num: Complex64 = self.mu.iter().zip(&self.weights).map(|(m, w)| m * w).sum();
        let den: Complex64 = self.weights.iter().sum();
        num.re / den.re
    }

    pub fn weight_sum(&self) -> Complex64 {
        self.weights.iter().sum()
    }

    /// Index of the mode with the smallest real decay rate.
    pub fn slowest(&self) -> usize {
        let mut best = 0;
        for j in 1..self.mu.len() {
            if self.mu[j].re < self.mu[best].re {
                best = j;
            }
        }
        best
    }

    pub fn correlation(&self, t: f64) -> f64 {
        self.mu
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| (w * (-m * t / 2.0).exp()).re)
            .sum()
    }

    /// `S(omega) = Σ_j Re[g_j / (mu_j / 2 - i omega)]`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.mu
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| (w / (m / 2.0 - Complex64::new(0.0, omega))).re)
            .sum()
    }

    pub fn check_decaying(&self) -> Result<()> {
        match self.mu.iter().find(|m| !(m.re > 0.0)) {
            Some(m) => Err(Error::NonDecaying(m.re)),
            None => Ok(()),
        }
    }

    /// Full width at half maximum of [`Self::spectral_density`].
    pub fn fwhm(&self) -> Result<f64> {
        self.check_decaying()?;
        let s = |w: f64| self.spectral_density(w);
        let total: f64 = self.weights.iter().map(|w| w.norm()).sum();
        let reach = self
            .mu
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| w.norm() > 1e-6 * total)
            .map(|(m, _)| m.re / 2.0 + m.im.abs() / 2.0)
            .fold(0.0, f64::max);
        let span = 4.0 * reach;
        let samples = 4001;
        let step = 2.0 * span / (samples - 1) as f64;
        let mut peak = 0.0;
        let mut best = s(0.0);
        for i in 0..samples {
            let w = -span + step * i as f64;
            let v = s(w);
            if v > best {
                best = v;
                peak = w;
            }
        }
        let (peak, max) = golden_max(&s, peak - step, peak + step);
        let (peak, max) = if max >= best { (peak, max) } else { (peak, best) };
        if !(max > 0.0) {
            return Err(Error::Numerical("spectrum has no positive peak".into()));
        }
        let half = max / 2.0;
        let right = half_crossing(&s, peak, half, reach.max(f64::MIN_POSITIVE))?;
        let left = half_crossing(&s, peak, half, -reach.max(f64::MIN_POSITIVE))?;
        Ok(right - left)
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-14 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Walks from `start` in steps that double from `step` until the function
/// drops below `level`, then bisects.
fn half_crossing(f: &impl Fn(f64) -> f64, start: f64, level: f64, step: f64) -> Result<f64> {
    let mut inside = start;
    let mut delta = step;
    let mut outside = start + delta;
    let mut guard = 0;
    while f(outside) > level {
        inside = outside;
        delta *= 2.0;
        outside = start + delta;
        guard += 1;
        if guard > 200 {
            return Err(Error::Numerical("half maximum not bracketed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if f(mid) > level {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Eigen-expansion of `g(t)` from the right eigenvectors of the generator.
pub fn spectral_decomposition(gen: &SidebandGenerator, v0: &[f64]) -> Result<SpectralDecomposition> {
    let n_mean = field_amplitude(v0);
    if !(n_mean > 0.0) {
        return Err(Error::Vacuum);
    }
    let dim = gen.dim();
    // G' = S^-1 G S with |G'_{n,n-1}| = |G'_{n-1,n}|; same spectrum, far
    // better conditioned eigenvectors.
    let scale = gen.balancing_scale();
    let balanced = Mat::from_fn(dim, dim, |i, j| {
        let raw = if i == j {
            gen.diag[i]
        } else if j + 1 == i {
            gen.sub[i]
        } else if i + 1 == j {
            gen.sup[i]
        } else {
            return 0.0;
        };
        raw * scale[j] / scale[i]
    });
    let (lambda, vectors, real_vectors) = real_eigen(&balanced)?;

    for j in 0..dim {
        let mut res = 0.0;
        let mut norm = 0.0;
        for i in 0..dim {
            let mut gx = balanced[(i, i)] * vectors[(i, j)];
            if i > 0 {
                gx += balanced[(i, i - 1)] * vectors[(i - 1, j)];
            }
            if i + 1 < dim {
                gx += balanced[(i, i + 1)] * vectors[(i + 1, j)];
            }
            res += (gx - lambda[j] * vectors[(i, j)]).norm_sqr();
            norm += vectors[(i, j)].norm_sqr();
        }
        if res.sqrt() > EIGEN_RESIDUAL * norm.sqrt() {
            return Err(Error::IllConditioned(format!(
                "eigenpair {j} has residual {:e}",
                res.sqrt() / norm.sqrt()
            )));
        }
    }

    // Expand v0 in the real Schur-style basis (Re x, Im x per complex pair),
    // so conjugate pairs get conjugate coefficients by construction.
    let target: Vec<f64> = v0.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let rhs = Mat::from_fn(dim, 1, |i, _| target[i]);
    let real_coeffs = real_vectors.partial_piv_lu().solve(&rhs);
    let mut res = 0.0;
    let mut norm = 0.0;
    for i in 0..dim {
        let mut acc = 0.0;
        for j in 0..dim {
            acc += real_vectors[(i, j)] * real_coeffs[(j, 0)];
        }
        res += (acc - target[i]).powi(2);
        norm += target[i] * target[i];
    }
    if !res.is_finite() || res.sqrt() > EIGEN_RESIDUAL * norm.sqrt() {
        return Err(Error::IllConditioned(
            "eigenvectors do not span the initial sideband (defective generator)".into(),
        ));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
    let mut j = 0;
    while j < dim {
        if lambda[j].im == 0.0 {
            coeffs[j] = Complex64::new(real_coeffs[(j, 0)], 0.0);
            j += 1;
        } else {
            let c = Complex64::new(real_coeffs[(j, 0)], -real_coeffs[(j + 1, 0)]) / 2.0;
            coeffs[j] = c;
            coeffs[j + 1] = c.conj();
            j += 2;
        }
    }

    let mut mu = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    for j in 0..dim {
        let projection: Complex64 = (0..dim)
            .map(|i| ((i + 1) as f64).sqrt() * scale[i] * vectors[(i, j)])
            .sum();
        mu.push(-2.0 * lambda[j]);
        weights.push(coeffs[j] * projection);
    }
    let decomposition = SpectralDecomposition { mu, weights, n_mean };
    let sum = decomposition.weight_sum();
    if (sum.re - n_mean).abs() > SUM_RULE_TOLERANCE * n_mean || sum.im.abs() > SUM_RULE_TOLERANCE * n_mean {
        return Err(Error::IllConditioned(format!(
            "weights sum to {sum} instead of {n_mean}"
        )));
    }
    check_conjugate_pairs(&decomposition)?;
    Ok(decomposition)
}

fn check_conjugate_pairs(d: &SpectralDecomposition) -> Result<()> {
    let scale = d.mu.iter().map(|m| m.norm()).fold(0.0, f64::max).max(1.0);
    let weight_scale = d.weights.iter().map(|w| w.norm()).fold(0.0, f64::max).max(d.n_mean);
    let mut j = 0;
    while j < d.mu.len() {
        if d.mu[j].im == 0.0 {
            if d.weights[j].im.abs() > 1e-8 * weight_scale {
                return Err(Error::Numerical(format!("real mode {j} has a complex weight {} (scale {weight_scale})", d.weights[j])));
            }
            j += 1;
            continue;
        }
        let paired = j + 1 < d.mu.len()
            && (d.mu[j + 1] - d.mu[j].conj()).norm() <= 1e-12 * scale
            && (d.weights[j + 1] - d.weights[j].conj()).norm() <= 1e-8 * weight_scale;
        if !paired {
            return Err(Error::Numerical(format!("complex mode {j} lacks its conjugate")));
        }
        j += 2;
    }
    Ok(())
}

/// Eigenvalues and right eigenvectors of a real matrix, computed serially.
///
/// Complex pairs come out adjacent as `(lambda, conj lambda)`; the real
/// factor holds `(Re x, Im x)` in the same two columns.
fn real_eigen(a: &Mat<f64>) -> Result<(Vec<Complex64>, Mat<Complex64>, Mat<f64>)> {
    let n = a.nrows();
    let par = Par::Seq;
    let mut s_re = Diag::<f64>::zeros(n);
    let mut s_im = Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let mut buffer = MemBuffer::new(evd::evd_scratch::<f64>(
        n,
        ComputeEigenvectors::No,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    evd::evd_real(
        a.as_ref(),
        s_re.as_mut(),
        s_im.as_mut(),
        None,
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buffer),
        Default::default(),
    )
    .map_err(|e| Error::Numerical(format!("eigen-decomposition failed: {e:?}")))?;
    let re = s_re.column_vector();
    let im = s_im.column_vector();
    let mut lambda = vec![Complex64::new(0.0, 0.0); n];
    let mut vectors = Mat::<Complex64>::zeros(n, n);
    let mut j = 0;
    while j < n {
        if im[j] == 0.0 {
            lambda[j] = Complex64::new(re[j], 0.0);
            for i in 0..n {
                vectors[(i, j)] = Complex64::new(u[(i, j)], 0.0);
            }
            j += 1;
        } else {
            lambda[j] = Complex64::new(re[j], im[j]);
            lambda[j + 1] = Complex64::new(re[j], -im[j]);
            for i in 0..n {
                vectors[(i, j)] = Complex64::new(u[(i, j)], u[(i, j + 1)]);
                vectors[(i, j + 1)] = Complex64::new(u[(i, j)], -u[(i, j + 1)]);
            }
            j += 2;
        }
    }
    Ok((lambda, vectors, u))
}

/// Spectrum on `omega_grid` and its full width at half maximum.
pub fn spectrum_and_fwhm(
    decomposition: &SpectralDecomposition,
    omega_grid: &[f64],
) -> Result<(Vec<f64>, f64)> {
    decomposition.check_decaying()?;
    let s = omega_grid
        .iter()
        .map(|&w| decomposition.spectral_density(w))
        .collect();
    Ok((s, decomposition.fwhm()?))
}
