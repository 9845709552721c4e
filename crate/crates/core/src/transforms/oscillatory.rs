//! Integrals of slowly decaying oscillatory integrands over half-lines.
//!
//! Panels grow geometrically from the start point until they would exceed
//! half a period π/|ω|; from there on they are aligned to multiples of the
//! half period, and the sequence of partial sums is accelerated with Wynn's
//! epsilon algorithm.

use super::quad::{integrate, wynn_epsilon, Integral};
use super::QuadratureConfig;
use crate::error::{Error, Result};

const MAX_GEOMETRIC_PANELS: usize = 256;
const MAX_OSCILLATORY_PANELS: usize = 200_000;
const MIN_OSCILLATORY_PANELS: usize = 8;
const WYNN_WINDOW: usize = 48;

/// ∫_start^∞ f(x) dx for an integrand oscillating at angular frequency `freq`
/// with |f(x)| ≤ envelope(x), envelope decreasing. `scale` sets the first
/// panel width.
pub fn fourier_integral<F, E>(
    f: F,
    start: f64,
    freq: f64,
    envelope: E,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
    E: Fn(f64) -> f64,
{
    oscillatory_integral(f, start, f64::INFINITY, freq, envelope, scale, cfg)
}

/// As [`fourier_integral`] on [start, end]; `end` may be infinite.
pub(crate) fn oscillatory_integral<F, E>(
    mut f: F,
    start: f64,
    end: f64,
    freq: f64,
    envelope: E,
    scale: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let tol = |v: f64| cfg.abs_tol.max(cfg.rel_tol * v.abs());
    let panel = |f: &mut F, a: f64, b: f64| {
        integrate(&mut *f, a, b, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions)
    };
    let half_period = if freq == 0.0 {
        f64::INFINITY
    } else {
        std::f64::consts::PI / freq.abs()
    };

    let mut x = start;
    let mut width = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let mut total = 0.0;
    let mut err = 0.0;
    let mut all_converged = true;

    // geometric phase
    let mut n = 0;
    while x < end && width < half_period {
        if n == MAX_GEOMETRIC_PANELS {
            return Err(Error::Convergence(format!(
                "integral from {start} did not settle after {n} geometric panels"
            )));
        }
        let b = (x + width).min(end);
        let p = panel(&mut f, x, b);
        total += p.value;
        err += p.abs_error;
        all_converged &= p.converged;
        x = b;
        width *= 2.0;
        n += 1;
        if end.is_infinite() && n >= 4 && p.value.abs() <= 1e-3 * tol(total) && envelope(x) * x.abs().max(width) <= 1e-3 * tol(total) {
            break;
        }
    }
    if x >= end || half_period.is_infinite() {
        return Ok(Integral {
            value: total,
            abs_error: err,
            converged: all_converged,
        });
    }

    // oscillatory phase: boundaries at multiples of the half period
    let mut sums = Vec::new();
    let next = ((x / half_period).floor() + 1.0) * half_period;
    let b = next.min(end);
    let p = panel(&mut f, x, b);
    total += p.value;
    err += p.abs_error;
    x = b;
    sums.push(total);

    let mut last_est: Option<f64> = None;
    let mut agreements = 0;
    let mut pieces: Vec<f64> = Vec::new();
    for k in 0..MAX_OSCILLATORY_PANELS {
        if x >= end {
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged: all_converged,
            });
        }
        if envelope(x) * half_period <= 1e-3 * tol(total) {
            return Ok(Integral {
                value: total,
                abs_error: err + envelope(x) * half_period,
                converged: all_converged,
            });
        }
        let b = (x + half_period).min(end);
        let p = panel(&mut f, x, b);
        total += p.value;
        err += p.abs_error;
        all_converged &= p.converged;
        x = b;
        sums.push(total);
        pieces.push(p.value);
        if k + 1 < MIN_OSCILLATORY_PANELS {
            continue;
        }
        let recent = &pieces[pieces.len() - MIN_OSCILLATORY_PANELS..];
        let flips = recent.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        if flips == 0 {
            // the integrand does not oscillate at this frequency
            return geometric_tail(f, x, end, half_period, &envelope, total, err, all_converged, cfg);
        }
        if flips + 1 < MIN_OSCILLATORY_PANELS / 2 {
            agreements = 0;
            last_est = None;
            continue;
        }
        let window = &sums[sums.len().saturating_sub(WYNN_WINDOW)..];
        if let Some((est, werr)) = wynn_epsilon(window) {
            if let Some(prev) = last_est {
                if (est - prev).abs() <= tol(est) {
                    agreements += 1;
                } else {
                    agreements = 0;
                }
            }
            last_est = Some(est);
            if agreements >= 2 {
                return Ok(Integral {
                    value: est,
                    abs_error: err + werr,
                    converged: all_converged,
                });
            }
        }
    }
    Err(Error::Convergence(format!(
        "oscillatory integral from {start} at frequency {freq}: no agreement after {MAX_OSCILLATORY_PANELS} panels"
    )))
}

/// Continues with doubling panels from `x` once oscillation has died out.
#[allow(clippy::too_many_arguments)]
fn geometric_tail<F, E>(
    mut f: F,
    mut x: f64,
    end: f64,
    width: f64,
    envelope: &E,
    mut total: f64,
    mut err: f64,
    mut converged: bool,
    cfg: &QuadratureConfig,
) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let tol = |v: f64| cfg.abs_tol.max(cfg.rel_tol * v.abs());
    let mut w = width;
    for _ in 0..MAX_GEOMETRIC_PANELS {
        if x >= end {
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged,
            });
        }
        let b = (x + w).min(end);
        let p = integrate(&mut f, x, b, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions);
        total += p.value;
        err += p.abs_error;
        converged &= p.converged;
        x = b;
        w *= 2.0;
        if end.is_infinite() && p.value.abs() <= 1e-3 * tol(total) && envelope(x) * x.abs() <= 1e-3 * tol(total) {
            return Ok(Integral {
                value: total,
                abs_error: err,
                converged,
            });
        }
    }
    Err(Error::Convergence(format!(
        "non-oscillatory tail from {x} did not settle"
    )))
}
