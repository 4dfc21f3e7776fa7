//! Dormand-Prince 5(4) with a PI step-size controller.
//!
//! The local error is controlled per unit step: a step of length `h` may
//! commit `tol * h / span` where `span` is the full integration interval, so
//! the accumulated error stays at the requested tolerance even over many
//! oscillation periods.

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (FSAL: also the last stage row)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const BETA: f64 = 0.04;
// error per unit step behaves like h^4
const ALPHA: f64 = 0.25 - 0.75 * BETA;
const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

type Vec3 = [f64; 3];

fn axpy(y: &Vec3, terms: &[(f64, &Vec3)], h: f64) -> Vec3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `dy/dt = rhs(y)` from `t = 0`, recording the state at each of
/// the nondecreasing `times`.
pub fn integrate<F>(rhs: F, y0: Vec3, times: &[f64], tol: Tolerances) -> Result<(Vec<Vec3>, Stats)>
where
    F: Fn(&Vec3) -> Vec3,
{
    let mut out = Vec::with_capacity(times.len());
    let mut stats = Stats::default();
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = rhs(&y);
    let span = times.iter().copied().fold(0.0, f64::max);
    let mut h = initial_step(&rhs, &y, &k1, tol);
    let mut prev_err: f64 = 1e-4;

    for &target in times {
        if target < t {
            return Err(Error::Integration {
                reached: t,
                reason: format!("output time {target} is not increasing"),
            });
        }
        while t < target {
            if stats.accepted + stats.rejected >= MAX_STEPS {
                return Err(Error::Integration { reached: t, reason: "step budget exhausted".into() });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::Integration { reached: t, reason: "step size underflow".into() });
            }

            let k2 = rhs(&axpy(&y, &[(A21, &k1)], step));
            let k3 = rhs(&axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = rhs(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = rhs(&axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step));
            let k6 = rhs(&axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                step,
            ));
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let k7 = rhs(&y_new);

            let mut err_sq = 0.0;
            for i in 0..3 {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale).powi(2);
            }
            let err = (err_sq / 3.0).sqrt() * span / step;
            if !err.is_finite() {
                return Err(Error::Integration { reached: t, reason: "non-finite error estimate".into() });
            }

            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-ALPHA) * prev_err.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                prev_err = err.max(1e-4);
                // a step clipped to hit an output time says nothing about the natural step
                if !last || step >= h {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * (SAFETY * err.powf(-0.25)).max(MIN_FACTOR);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

fn initial_step<F: Fn(&Vec3) -> Vec3>(rhs: &F, y: &Vec3, f0: &Vec3, tol: Tolerances) -> f64 {
    let scale = |i: usize, v: &Vec3| tol.abs + tol.rel * v[i].abs();
    let norm = |v: &Vec3, s: &Vec3| {
        ((0..3).map(|i| (v[i] / scale(i, s)).powi(2)).sum::<f64>() / 3.0).sqrt()
    };
    let d0 = norm(y, y);
    let d1 = norm(f0, y);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y, &[(1.0, f0)], h0);
    let f1 = rhs(&y1);
    let diff = [f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2]];
    let d2 = norm(&diff, y) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
