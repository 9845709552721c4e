//! Numeric transform utilities: Gil-Pelaez inversion of characteristic
//! functions, and quadrature/summation oracles for MGFs and CFs.

pub mod oscillatory;
pub mod quad;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{input, Error, Result};
use crate::kernels::{Family, KernelDistribution};
use oscillatory::{fourier_integral, oscillatory_integral};
use quad::integrate;

/// Tolerances shared by the numeric routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Stop extending the ω-range once |φ(ω)| falls below this.
    pub truncation_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            truncation_threshold: 1e-16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.abs_tol) || !pos(self.rel_tol) {
            return Err(input!(
                "tolerances must be positive, got abs_tol={} rel_tol={}",
                self.abs_tol,
                self.rel_tol
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(input!("max_subdivisions must be >= 1"));
        }
        if !pos(self.truncation_threshold) {
            return Err(input!(
                "truncation_threshold must be positive, got {}",
                self.truncation_threshold
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryHint {
    /// φ is real and even: the law is symmetric about 0.
    RealSymmetric,
    General,
}

/// A characteristic function ω ↦ φ(ω).
pub struct CharacteristicFunction<'a> {
    evaluator: Box<dyn Fn(f64) -> Complex64 + 'a>,
    symmetry_hint: SymmetryHint,
}

impl fmt::Debug for CharacteristicFunction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacteristicFunction")
            .field("symmetry_hint", &self.symmetry_hint)
            .finish_non_exhaustive()
    }
}

impl<'a> CharacteristicFunction<'a> {
    /// Wraps an evaluator; φ(0) must equal 1 within 1e-12.
    pub fn new<F>(evaluator: F, symmetry_hint: SymmetryHint) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + 'a,
    {
        let at0 = evaluator(0.0);
        if !((at0 - 1.0).norm() <= 1e-12) {
            return Err(input!("characteristic function must equal 1 at 0, got {at0}"));
        }
        Ok(CharacteristicFunction {
            evaluator: Box::new(evaluator),
            symmetry_hint,
        })
    }

    /// The CF of a kernel; symmetric laws centred at 0 get the real hint.
    pub fn of_kernel(dist: &'a KernelDistribution) -> Self {
        let symmetric = match dist.family() {
            Family::DifferentiatedErrorFunction | Family::DiscreteLaplace => true,
            Family::Normal | Family::Laplace => dist.param("m") == Some(0.0),
            _ => false,
        };
        CharacteristicFunction {
            evaluator: Box::new(move |w| dist.cf(w)),
            symmetry_hint: if symmetric {
                SymmetryHint::RealSymmetric
            } else {
                SymmetryHint::General
            },
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        (self.evaluator)(omega)
    }

    pub fn symmetry_hint(&self) -> SymmetryHint {
        self.symmetry_hint
    }
}

/// A density recovered from a characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertedDensity {
    /// max(raw, 0)
    pub value: f64,
    pub raw: f64,
    /// raw was negative and has been clamped to 0
    pub clamped: bool,
    pub abs_error: f64,
    /// ω beyond which |φ| was found below the truncation threshold
    pub truncation: f64,
}

const TRUNCATION_DOUBLINGS: usize = 60;
const TRUNCATION_PROBES: usize = 8;

/// Smallest W = 2^k with max |φ| over [W, 2W] below the threshold.
fn truncation_point(cf: &CharacteristicFunction<'_>, threshold: f64) -> Result<f64> {
    let mut w = 1.0;
    for _ in 0..TRUNCATION_DOUBLINGS {
        let peak = (0..TRUNCATION_PROBES)
            .map(|k| {
                let om = w * (1.0 + k as f64 / (TRUNCATION_PROBES - 1) as f64);
                cf.eval(om).norm()
            })
            .fold(0.0, f64::max);
        if peak < threshold {
            return Ok(w);
        }
        w *= 2.0;
    }
    Err(Error::Convergence(format!(
        "|φ(ω)| did not fall below {threshold} for ω up to {w:e}"
    )))
}

/// Asymptotic phase rate of φ (the drift of arg φ), measured at the largest
/// power of two where |φ| is still well above rounding noise.
fn phase_rate(cf: &CharacteristicFunction<'_>, w_max: f64) -> f64 {
    let mut om = 1.0;
    let mut best = None;
    while om <= w_max {
        if cf.eval(om).norm() > 1e-8 {
            best = Some(om);
        }
        om *= 2.0;
    }
    let Some(om) = best else { return 0.0 };
    let h = 1e-4;
    let z = cf.eval(om + h) * cf.eval(om).conj();
    z.im.atan2(z.re) / h
}

/// Density at y by Gil-Pelaez inversion, f(y) = (1/π)∫₀^∞ Re[e^{−iyω}φ(ω)] dω.
pub fn gil_pelaez_pdf(
    cf: &CharacteristicFunction<'_>,
    y: f64,
    cfg: &QuadratureConfig,
) -> Result<InvertedDensity> {
    cfg.validate()?;
    if !y.is_finite() {
        return Err(input!("inversion point must be finite, got {y}"));
    }
    let w = truncation_point(cf, cfg.truncation_threshold)?;
    let integrand = |om: f64| {
        let phi = cf.eval(om);
        match cf.symmetry_hint {
            SymmetryHint::RealSymmetric => (y * om).cos() * phi.re,
            SymmetryHint::General => (y * om).cos() * phi.re + (y * om).sin() * phi.im,
        }
    };
    let envelope = |om: f64| cf.eval(om).norm();
    let scale = w.min(1.0) / 8.0;
    // Re[e^{-iyω}φ(ω)] oscillates at y minus the phase rate of φ
    let freq = match cf.symmetry_hint {
        SymmetryHint::RealSymmetric => y,
        SymmetryHint::General => {
            let f = y - phase_rate(cf, w);
            if f.abs() < 1e-9 * y.abs().max(1.0) {
                0.0
            } else {
                f
            }
        }
    };
    let r = oscillatory_integral(integrand, 0.0, w, freq, envelope, scale, cfg)?;
    let raw = r.value / PI;
    // mass discarded beyond W: about W|φ(W)| without oscillation, |φ(W)|/f with it
    let span = if freq == 0.0 { w } else { w.min(1.0 / freq.abs()) };
    let tail = cfg.truncation_threshold * span / PI;
    Ok(InvertedDensity {
        value: raw.max(0.0),
        raw,
        clamped: raw < 0.0,
        abs_error: r.abs_error / PI + tail,
        truncation: w,
    })
}

const MAX_SUM_TERMS: usize = 1_000_000;
const MAX_TAIL_PANELS: usize = 200;
/// Consecutive growing panels that signal a divergent integral.
const GROWTH_RUN: usize = 40;

fn divergence(what: &str, s: f64) -> Error {
    Error::Divergence {
        what: format!("numeric {what}"),
        arg: s,
        strip: "detected numerically".into(),
    }
}

/// Streaming log-sum-exp accumulator.
struct LogSum {
    max: f64,
    acc: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            acc: 0.0,
        }
    }

    fn add(&mut self, l: f64) {
        if l == f64::NEG_INFINITY {
            return;
        }
        if l > self.max {
            self.acc = self.acc * (self.max - l).exp() + 1.0;
            self.max = l;
        } else {
            self.acc += (l - self.max).exp();
        }
    }

    fn ln(&self) -> f64 {
        self.max + self.acc.ln()
    }
}

/// Σ e^{term(x)} over x = start, start + step, … until terms are negligible.
fn log_series<T: Fn(f64) -> f64>(term: T, start: f64, step: f64, sum: &mut LogSum, what: &str, s: f64) -> Result<()> {
    let mut prev = f64::INFINITY;
    let mut x = start;
    for _ in 0..MAX_SUM_TERMS {
        let l = term(x);
        if l.is_nan() || l == f64::INFINITY {
            return Err(divergence(what, s));
        }
        sum.add(l);
        if l < prev && l < sum.ln() + (1e-18f64).ln() {
            return Ok(());
        }
        prev = l;
        x += step;
    }
    Err(divergence(what, s))
}

/// ∫ g over [start, ±∞) by geometrically growing panels.
fn half_line<G: FnMut(f64) -> f64>(
    mut g: G,
    start: f64,
    dir: f64,
    width: f64,
    cfg: &QuadratureConfig,
    what: &str,
    s: f64,
) -> Result<f64> {
    let mut x = start;
    let mut w = width;
    let mut total = 0.0;
    let mut prev = 0.0;
    let mut growing = 0;
    for k in 0..MAX_TAIL_PANELS {
        let b = x + dir * w;
        let (lo, hi) = if dir > 0.0 { (x, b) } else { (b, x) };
        let piece = integrate(&mut g, lo, hi, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions).value;
        total += piece;
        if !total.is_finite() {
            return Err(divergence(what, s));
        }
        if piece.abs() >= prev && piece > 0.0 {
            growing += 1;
            if growing >= GROWTH_RUN {
                return Err(divergence(what, s));
            }
        } else {
            growing = 0;
        }
        if k >= 3 && piece.abs() <= 1e-13 * total.abs() {
            return Ok(total);
        }
        if k >= 3 && total == 0.0 && piece == 0.0 {
            return Ok(0.0);
        }
        prev = piece.abs();
        x = b;
        w *= 2.0;
    }
    Err(divergence(what, s))
}

/// Centre and width for panel layout, with the centre inside the support.
fn layout(dist: &KernelDistribution) -> (f64, f64, f64, f64) {
    let (lo, hi) = dist.support();
    let (c, w) = dist.scale_hint();
    let c = if c.is_finite() { c } else { lo + w };
    let c = c.clamp(lo, hi);
    (lo, hi, c, w)
}

/// E[e^{sX}] by direct summation (discrete) or quadrature (continuous) of the
/// density; an oracle independent of the closed forms.
pub fn numeric_mgf(dist: &KernelDistribution, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !s.is_finite() {
        return Err(input!("MGF argument must be finite, got {s}"));
    }
    let value = if dist.is_discrete() {
        let term = |x: f64| s * x + dist.ln_density(x);
        let mut sum = LogSum::new();
        let (lo, _) = dist.support();
        if lo.is_finite() {
            log_series(term, lo, 1.0, &mut sum, "MGF sum", s)?;
        } else {
            log_series(term, 0.0, 1.0, &mut sum, "MGF sum", s)?;
            log_series(term, -1.0, -1.0, &mut sum, "MGF sum", s)?;
        }
        sum.ln().exp()
    } else {
        let g = |x: f64| {
            let l = dist.ln_density(x);
            if l == f64::NEG_INFINITY {
                0.0
            } else {
                (s * x + l).exp()
            }
        };
        let (lo, hi, c, w) = layout(dist);
        if lo.is_finite() && hi.is_finite() {
            integrate(g, lo, hi, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions).value
        } else {
            let left = if lo.is_finite() {
                integrate(g, lo, c, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions).value
            } else {
                half_line(g, c, -1.0, w, cfg, "MGF integral", s)?
            };
            left + half_line(g, c, 1.0, w, cfg, "MGF integral", s)?
        }
    };
    if !value.is_finite() {
        return Err(Error::Range(format!("numeric MGF overflows at s={s}")));
    }
    Ok(value)
}

/// E[e^{iωX}] by summation or oscillatory quadrature of the density.
pub fn numeric_cf(dist: &KernelDistribution, omega: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    if !omega.is_finite() {
        return Err(input!("CF argument must be finite, got {omega}"));
    }
    if omega == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if dist.is_discrete() {
        let (lo, _) = dist.support();
        let mut terms: Vec<Complex64> = Vec::new();
        let mut walk = |start: f64, step: f64| -> Result<()> {
            let mut x = start;
            let mut mass = 0.0;
            let mut prev = f64::INFINITY;
            for _ in 0..MAX_SUM_TERMS {
                let p = dist.density(x);
                mass += p;
                terms.push(Complex64::from_polar(p, omega * x));
                if p < prev && p < 1e-18 * mass.max(1e-300) {
                    return Ok(());
                }
                prev = p;
                x += step;
            }
            Err(Error::Convergence(format!("numeric CF sum at ω={omega}")))
        };
        if lo.is_finite() {
            walk(lo, 1.0)?;
        } else {
            walk(0.0, 1.0)?;
            walk(-1.0, -1.0)?;
        }
        let re: Vec<f64> = terms.iter().map(|z| z.re).collect();
        let im: Vec<f64> = terms.iter().map(|z| z.im).collect();
        return Ok(Complex64::new(quad::pairwise_sum(&re), quad::pairwise_sum(&im)));
    }

    let (lo, hi, c, w) = layout(dist);
    let part = |trig: fn(f64) -> f64| -> Result<f64> {
        let f = |x: f64| trig(omega * x) * dist.density(x);
        let env = |x: f64| dist.density(x);
        let tight = |a: f64, b: f64| {
            integrate(f, a, b, 1e-3 * cfg.abs_tol, 1e-2 * cfg.rel_tol, cfg.max_subdivisions).value
        };
        if lo.is_finite() && hi.is_finite() {
            return Ok(tight(lo, hi));
        }
        let right = fourier_integral(f, c, omega, env, w, cfg)?.value;
        let left = if lo.is_finite() {
            tight(lo, c)
        } else {
            // reflect: ∫_{-∞}^c f(x) dx = ∫_0^∞ f(c − u) du
            fourier_integral(|u| f(c - u), 0.0, omega, |u| env(c - u), w, cfg)?.value
        };
        Ok(left + right)
    };
    Ok(Complex64::new(part(f64::cos)?, part(f64::sin)?))
}

#[cfg(test)]
mod tests;
