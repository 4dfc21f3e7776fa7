use rayon::prelude::*;

use super::config::{FreqMode, RunConfig};
use super::output::{Cell, Table};
use super::CliError;
use crate::boundary;
use crate::dynamics;
use crate::error::Error;
use crate::metrology;
use crate::qfi::{self, Method, ParameterTag};
use crate::types::{Environment, Warning};

const OPTIMIZER_TOL: f64 = 1e-10;

/// Evaluates `row` at every grid value in parallel, keeping grid order.
fn rows_over<F>(values: &[f64], row: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Cell>, CliError> + Sync,
{
    values.par_iter().map(|&x| row(x)).collect()
}

fn num(e: Error) -> CliError {
    CliError::from(e)
}

pub fn scan_boundary(cfg: &RunConfig) -> Result<Table, CliError> {
    let alpha = cfg.polarization()?;
    let grid = cfg.grid()?;
    if grid.min <= 0.0 {
        return Err(CliError::Config("scan-boundary needs a grid over zeta > 0".into()));
    }
    let mut table = Table::new(vec!["zeta", "f_parallel", "f_perp", "f_eff", "one_minus_f", "gamma_over_gamma0"]);
    table.rows = rows_over(&grid.values(), |zeta| {
        let eval = boundary::evaluate(2.0 * zeta).map_err(num)?;
        let f = boundary::f_eff(&alpha, zeta).map_err(num)?;
        let one_minus_f = boundary::one_minus_f_eff(&alpha, zeta).map_err(num)?;
        Ok(vec![
            zeta.into(),
            eval.f_parallel.into(),
            eval.f_perp.into(),
            f.into(),
            one_minus_f.into(),
            one_minus_f.into(),
        ])
    })?;
    Ok(table)
}

fn time_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let grid = cfg.grid()?;
    if grid.min < 0.0 {
        return Err(CliError::Config("time grid must start at gamma0 tau >= 0".into()));
    }
    Ok(grid.values())
}

pub fn evolve(cfg: &RunConfig) -> Result<Table, CliError> {
    let atom = cfg.atom_spec()?;
    let alpha = cfg.polarization()?;
    let coeffs = dynamics::kossakowski_coefficients(&atom, &cfg.environment, &alpha).map_err(num)?;
    let w0 = atom.initial_bloch();
    let mut table = Table::new(vec!["gamma0_tau", "w1", "w2", "w3", "purity"]);
    table.rows = rows_over(&time_grid(cfg)?, |tau| {
        let rec = dynamics::EvolutionRecord::new(tau, dynamics::propagate_bloch(w0, &coeffs, tau).map_err(num)?);
        Ok(vec![
            (tau * atom.gamma0).into(),
            rec.bloch.w1.into(),
            rec.bloch.w2.into(),
            rec.bloch.w3.into(),
            rec.purity.into(),
        ])
    })?;
    Ok(table)
}

pub fn qfi(cfg: &RunConfig) -> Result<Table, CliError> {
    let atom = cfg.atom_spec()?;
    let alpha = cfg.polarization()?;
    let env = cfg.environment;
    let param = cfg.qfi.param;
    let methods = &cfg.qfi.methods;
    let mut table = Table::new(vec![
        "gamma0_tau",
        "value_closed",
        "value_bloch",
        "value_spectral",
        "max_pairwise_diff",
    ]);
    table.rows = rows_over(&time_grid(cfg)?, |tau| {
        let mut values = [None; 3];
        for (slot, method) in [Method::ClosedForm, Method::BlochForm, Method::SpectralForm].into_iter().enumerate() {
            if methods.contains(&method) {
                values[slot] = Some(qfi::qfi_sample(param, method, &atom, &env, &alpha, tau).map_err(num)?.value);
            }
        }
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let spread = (present.len() > 1).then(|| {
            let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        });
        Ok(vec![
            (tau * atom.gamma0).into(),
            values[0].into(),
            values[1].into(),
            values[2].into(),
            spread.into(),
        ])
    })?;
    Ok(table)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Single-shot or repeated-measurement optimum; analytic and numeric values side by side.
pub fn freq_opt(cfg: &RunConfig, warnings: &mut Vec<Warning>) -> Result<Table, CliError> {
    let atom = cfg.atom_spec()?;
    let alpha = cfg.polarization()?;
    let env = cfg.environment;
    let gamma = dynamics::effective_decay_rate(&atom, &env, &alpha).map_err(num)?;
    let shielded = match metrology::resolved_rate(&atom, &env, &alpha) {
        Ok(_) => false,
        Err(Error::Shielded { .. }) => true,
        Err(e) => return Err(e.into()),
    };
    let g = gamma / atom.gamma0;

    match cfg.freq_opt.mode {
        FreqMode::Single => {
            let mut table = Table::new(vec![
                "mode",
                "gamma_over_gamma0",
                "shielded",
                "tau_star",
                "tau_star_numeric",
                "tau_star_rel_diff",
                "f_max",
                "f_max_numeric",
                "f_max_rel_diff",
                "numeric_at_boundary",
            ]);
            let curve = |tau: f64| qfi::qfi_frequency_exact(&atom, &env, &alpha, tau);
            let row = if shielded {
                // QFI grows like tau^2 without bound; the optimizer runs into the bracket end
                let hi = 1e3 / atom.gamma0;
                let m = metrology::maximize_qfi_numeric(curve, 1e-3 / atom.gamma0, hi, OPTIMIZER_TOL)?;
                vec![
                    Cell::Text("single".into()),
                    g.into(),
                    true.into(),
                    Cell::Empty,
                    (m.tau_star * atom.gamma0).into(),
                    Cell::Empty,
                    Cell::Empty,
                    (m.f_max * atom.gamma0 * atom.gamma0).into(),
                    Cell::Empty,
                    m.at_boundary.into(),
                ]
            } else {
                let analytic = metrology::optimal_single_shot(gamma)?;
                let m = metrology::maximize_qfi_numeric(curve, 1e-3 / gamma, 20.0 / gamma, OPTIMIZER_TOL)?;
                let g0 = atom.gamma0;
                vec![
                    Cell::Text("single".into()),
                    g.into(),
                    false.into(),
                    (analytic.tau_star * g0).into(),
                    (m.tau_star * g0).into(),
                    rel_diff(analytic.tau_star, m.tau_star).into(),
                    (analytic.f_max * g0 * g0).into(),
                    (m.f_max * g0 * g0).into(),
                    rel_diff(analytic.f_max, m.f_max).into(),
                    m.at_boundary.into(),
                ]
            };
            table.rows.push(row);
            Ok(table)
        }
        FreqMode::Ramsey => {
            let total = cfg
                .freq_opt
                .total_time
                .ok_or_else(|| CliError::Config("ramsey mode needs freq_opt.total_time".into()))?
                / atom.gamma0;
            let mut table = Table::new(vec![
                "mode",
                "gamma_over_gamma0",
                "shielded",
                "total_time",
                "tau_star",
                "tau_star_numeric",
                "tau_star_rel_diff",
                "n_star",
                "delta_omega_min",
                "delta_omega_min_numeric",
                "delta_omega_min_rel_diff",
            ]);
            let g0 = atom.gamma0;
            let row = if shielded {
                // one uninterrupted probe over the whole budget
                let delta = metrology::ramsey_uncertainty(total, total, gamma)?;
                vec![
                    Cell::Text("ramsey".into()),
                    g.into(),
                    true.into(),
                    (total * g0).into(),
                    (total * g0).into(),
                    Cell::Empty,
                    Cell::Empty,
                    1.0.into(),
                    (delta / g0).into(),
                    Cell::Empty,
                    Cell::Empty,
                ]
            } else {
                let plan = metrology::optimal_ramsey(total, gamma)?;
                warnings.extend(plan.warnings.iter().cloned());
                let hi = (20.0 / gamma).min(total);
                let m = metrology::maximize_qfi_numeric(
                    |tau| metrology::ramsey_uncertainty(total, tau, gamma).map(|u| -u),
                    1e-3 / gamma,
                    hi,
                    OPTIMIZER_TOL,
                )?;
                vec![
                    Cell::Text("ramsey".into()),
                    g.into(),
                    false.into(),
                    (total * g0).into(),
                    (plan.tau_star * g0).into(),
                    (m.tau_star * g0).into(),
                    rel_diff(plan.tau_star, m.tau_star).into(),
                    plan.n_star.into(),
                    (plan.delta_omega_min / g0).into(),
                    (-m.f_max / g0).into(),
                    rel_diff(plan.delta_omega_min, -m.f_max).into(),
                ]
            };
            table.rows.push(row);
            Ok(table)
        }
    }
}

/// Difference between the first-order and exact frequency QFI on the time grid.
pub fn frequency_audit(cfg: &RunConfig) -> Result<Vec<(f64, f64)>, CliError> {
    let atom = cfg.atom_spec()?;
    let alpha = cfg.polarization()?;
    let env: Environment = cfg.environment;
    time_grid(cfg)?
        .into_iter()
        .map(|tau| {
            let exact = qfi::qfi_frequency_exact(&atom, &env, &alpha, tau)?;
            let approx = qfi::qfi_frequency_approx(&atom, &env, &alpha, tau)?;
            Ok((tau, approx - exact))
        })
        .collect::<Result<_, Error>>()
        .map_err(CliError::from)
}

pub fn is_frequency(cfg: &RunConfig) -> bool {
    cfg.qfi.param == ParameterTag::Omega0
}
