//! The four subcommands. Scan rows are computed in parallel and kept in
//! scan order.

use std::f64::consts::FRAC_1_SQRT_2;

use micromaser::linewidth::{
    fock_resolved_weights, linewidth_exp_closed, linewidth_exp_scully, linewidth_main, linewidth_mcgowan,
    linewidth_scully, schawlow_townes_ratio,
};
use micromaser::regression::{
    build_sideband_generator, correlate, initial_sideband, linewidth_from_slope, spectral_decomposition,
    spectrum_and_fwhm,
};
use micromaser::steady_state::{auto_truncation, steady_state, steady_state_auto, steady_state_exp};
use micromaser::uniform::{build_uniform_lindblad, uniform_linewidth_from, SteadyStateSource, UniformOrders};
use micromaser::{Error, MaserParams, PhotonStatistics};
use rayon::prelude::*;

use crate::config::{Command, Resolved, ScanVar};
use crate::error::CliError;
use crate::table::{Document, Row, Section, OK};

/// Status column value for a row that failed in the model.
pub fn status_of(e: &Error) -> &'static str {
    match e {
        Error::Vacuum => "vacuum",
        Error::TruncationInadequate { .. } => "truncation_inadequate",
        Error::ResourceExhausted { .. } => "resource_exhausted",
        Error::IllConditioned(_) => "ill_conditioned",
        Error::NonDecaying(_) => "non_decaying",
        Error::Integration { .. } => "integration_failed",
        Error::InvalidParameter(_) => "invalid_parameter",
        _ => "numerical_error",
    }
}

fn statistics(cfg: &Resolved, params: &MaserParams) -> micromaser::Result<PhotonStatistics> {
    match cfg.trunc {
        Some(n) => steady_state(params, n),
        None => steady_state_auto(params),
    }
}

fn header(cfg: &Resolved) -> Result<Document, CliError> {
    let mut doc = Document::default();
    let command = serde_json::to_value(cfg.command).expect("command serializes");
    doc.meta("command", command);
    doc.meta("config", serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?);
    Ok(doc)
}

pub fn run(cfg: &Resolved) -> Result<Document, CliError> {
    match cfg.command {
        Command::ScanTheta => scan_theta(cfg),
        Command::FockResolved => fock_resolved(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::UniformConvergence => uniform_convergence(cfg),
    }
}

const SCAN_COLUMNS: [&str; 12] = [
    "theta", "g_tau", "rate", "n_mean", "D_main", "D_thermal", "D_cos", "D_sin", "D_scully", "D_mcgowan", "D_slope",
    "st_ratio",
];

fn scan_theta(cfg: &Resolved) -> Result<Document, CliError> {
    let root = (cfg.rate / cfg.kappa).sqrt();
    let points: Vec<(f64, f64)> = cfg
        .grid()
        .into_iter()
        .map(|x| match cfg.scan {
            ScanVar::Gtau => (cfg.rate, x),
            ScanVar::Theta => (cfg.rate, x / root),
            ScanVar::Rate => (x, cfg.g_tau[0]),
        })
        .collect();
    let rows: Vec<Row> = points
        .par_iter()
        .map(|&(rate, g_tau)| {
            let theta = (rate / cfg.kappa).sqrt() * g_tau;
            let lead = Row::new(OK).num(theta).num(g_tau).num(rate);
            match scan_theta_values(cfg, rate, g_tau) {
                Ok(values) => values.into_iter().fold(lead, Row::num),
                Err(e) => {
                    let mut row = Row::blank(0, status_of(&e)).num(theta).num(g_tau).num(rate);
                    for _ in 3..SCAN_COLUMNS.len() {
                        row = row.empty();
                    }
                    row
                }
            }
        })
        .collect();
    let mut doc = header(cfg)?;
    doc.meta_num("threshold_theta", 1.0);
    doc.sections.push(Section::new("rows", &SCAN_COLUMNS, rows));
    Ok(doc)
}

fn scan_theta_values(cfg: &Resolved, rate: f64, g_tau: f64) -> micromaser::Result<Vec<f64>> {
    let params = cfg.params(rate, g_tau).map_err(model_error)?;
    let p = statistics(cfg, &params)?;
    let d = linewidth_main(&params, &p)?;
    let scully = linewidth_scully(&params, &p)?;
    let mcgowan = linewidth_mcgowan(&params, &p)?;
    let gen = build_sideband_generator(&params, p.n_max())?;
    let slope = linewidth_from_slope(&gen, &initial_sideband(&p))?;
    let st = schawlow_townes_ratio(&params, &p, d.total);
    Ok(vec![p.mean(), d.total, d.thermal, d.cos, d.sin, scully, mcgowan, slope, st.ratio])
}

fn model_error(e: CliError) -> Error {
    match e {
        CliError::Model(e) => e,
        other => Error::InvalidParameter(other.to_string()),
    }
}

const FOCK_COLUMNS: [&str; 8] = [
    "theta", "g_tau", "n", "p_n", "w_main", "w_mcgowan", "w_main_normalized", "w_mcgowan_normalized",
];

fn fock_resolved(cfg: &Resolved) -> Result<Document, CliError> {
    let sets: Vec<Vec<Row>> = cfg
        .g_tau
        .par_iter()
        .map(|&g_tau| {
            let theta = (cfg.rate / cfg.kappa).sqrt() * g_tau;
            let computed = cfg
                .params(cfg.rate, g_tau)
                .map_err(model_error)
                .and_then(|params| {
                    let p = statistics(cfg, &params)?;
                    fock_resolved_weights(&params, &p)
                });
            match computed {
                Ok(w) => {
                    let (main_norm, mcg_norm) = w.max_normalized();
                    (0..w.p.len())
                        .map(|n| {
                            Row::new(OK)
                                .num(theta)
                                .num(g_tau)
                                .int(n)
                                .num(w.p[n])
                                .num(w.main[n])
                                .num(w.mcgowan[n])
                                .num(main_norm[n])
                                .num(mcg_norm[n])
                        })
                        .collect()
                }
                Err(e) => {
                    let mut row = Row::blank(0, status_of(&e)).num(theta).num(g_tau);
                    for _ in 2..FOCK_COLUMNS.len() {
                        row = row.empty();
                    }
                    vec![row]
                }
            }
        })
        .collect();
    let mut doc = header(cfg)?;
    doc.sections.push(Section::new("rows", &FOCK_COLUMNS, sets.into_iter().flatten().collect()));
    Ok(doc)
}

fn spectrum(cfg: &Resolved) -> Result<Document, CliError> {
    let params = cfg.params(cfg.rate, cfg.g_tau[0])?;
    let p = statistics(cfg, &params)?;
    let gen = build_sideband_generator(&params, p.n_max())?;
    let v0 = initial_sideband(&p);
    let d_slope = linewidth_from_slope(&gen, &v0)?;
    let decomp = spectral_decomposition(&gen, &v0)?;
    let d_eigen = decomp.mean_rate();
    let times = cfg.grid_over(0.0, 5.0 / d_slope);
    let g = correlate(&gen, &v0, &times)?;
    let fwhm = decomp.fwhm()?;
    let omegas = match (cfg.min, cfg.max) {
        (Some(lo), Some(hi)) => cfg.grid_over(lo, hi),
        _ => cfg.grid_over(-4.0 * fwhm, 4.0 * fwhm),
    };
    let (s, _) = spectrum_and_fwhm(&decomp, &omegas)?;

    let mut doc = header(cfg)?;
    doc.meta_num("n_mean", p.mean());
    doc.meta_num("D_slope", d_slope);
    doc.meta_num("D_eigen", d_eigen);
    doc.meta_num("FWHM", fwhm);
    let corr_rows = times.iter().zip(&g).map(|(&t, &v)| Row::new(OK).num(t).num(v)).collect();
    let spec_rows = omegas.iter().zip(&s).map(|(&w, &v)| Row::new(OK).num(w).num(v)).collect();
    doc.sections.push(Section::new("correlation", &["t", "g"], corr_rows));
    doc.sections.push(Section::new("spectrum", &["omega", "S"], spec_rows));
    Ok(doc)
}

fn uniform_convergence(cfg: &Resolved) -> Result<Document, CliError> {
    let g_bar = cfg.g_tau[0];
    let mut columns = vec!["theta_bar".to_string(), "rate".into(), "n_mean".into(), "D_exact".into(), "D_exp_scully".into()];
    columns.extend(cfg.orders.iter().map(|k| format!("D_order_{k}")));
    let width = columns.len();
    let rows: Vec<Row> = cfg
        .grid()
        .par_iter()
        .map(|&x| {
            let (theta_bar, rate) = match cfg.scan {
                ScanVar::Rate => ((x / cfg.kappa).sqrt() * g_bar, x),
                _ => (x, cfg.kappa * (x / g_bar).powi(2)),
            };
            let status = if theta_bar < FRAC_1_SQRT_2 { "below_threshold" } else { OK };
            match uniform_values(cfg, rate, g_bar) {
                Ok(values) => values.into_iter().fold(Row::new(status).num(theta_bar).num(rate), Row::num),
                Err(e) => {
                    let mut row = Row::blank(0, status_of(&e)).num(theta_bar).num(rate);
                    for _ in 2..width {
                        row = row.empty();
                    }
                    row
                }
            }
        })
        .collect();
    let mut doc = header(cfg)?;
    doc.meta_num("threshold_theta_bar", FRAC_1_SQRT_2);
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    doc.sections.push(Section::new("rows", &columns, rows));
    Ok(doc)
}

fn uniform_values(cfg: &Resolved, rate: f64, g_bar: f64) -> micromaser::Result<Vec<f64>> {
    let params = MaserParams::exponential(cfg.kappa, cfg.n_th, rate, g_bar)?;
    let n_max = match cfg.trunc {
        Some(n) => n,
        None => auto_truncation(&params)?,
    };
    let p = steady_state_exp(&params, n_max)?;
    let mut values = vec![
        p.mean(),
        linewidth_exp_closed(&params, &p)?,
        linewidth_exp_scully(&params, &p)?,
    ];
    for &k in &cfg.orders {
        let set = build_uniform_lindblad(&params, UniformOrders::paired(k), n_max)?;
        values.push(uniform_linewidth_from(&set, SteadyStateSource::SelfConsistent)?.0);
    }
    Ok(values)
}
