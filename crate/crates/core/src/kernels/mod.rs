//! Catalog of kernel distributions with CDF, density, MGF, Laplace transform,
//! characteristic function and seeded sampling.
//!
//! A [`KernelDistribution`] is a family plus a full set of parameter values,
//! with a designation of which parameters are free (mixed over) and which
//! are fixed. Parameter domains are checked at construction, so evaluation
//! only fails on out-of-strip transform arguments.

mod family;
pub(crate) mod spec;
mod tags;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr as rd;
use rand_distr::Distribution;

use crate::defun::DifferentiatedErrorFunction;
use crate::error::{domain, input, Error, Result};
use crate::special::{beta_reg, gamma_lr, gamma_ur, ln_gamma, ln_gamma_complex};
use crate::transforms::oscillatory::fourier_integral;
use crate::transforms::quad::integrate;
use crate::transforms::QuadratureConfig;

pub use family::{Family, ParamDomain};
pub use tags::{catalog, FamilyTag, KnownVerdict, Tag, Verdict};

/// Interval of arguments on which a moment-generating function is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Strip {
    const ALL: Strip = Strip {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    fn open(lo: f64, hi: f64) -> Strip {
        Strip {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        let above = s > self.lo || (self.lo_closed && s == self.lo);
        let below = s < self.hi || (self.hi_closed && s == self.hi);
        above && below
    }
}

impl std::fmt::Display for Strip {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// A parameterized kernel distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDistribution {
    family: Family,
    values: Vec<f64>,
    free: Vec<usize>,
}

impl KernelDistribution {
    /// Builds a kernel from named parameter values and the names of the free
    /// parameters. All remaining parameters are fixed.
    pub fn new(family: Family, params: &[(&str, f64)], free: &[&str]) -> Result<Self> {
        let names = family.param_names();
        for (n, _) in params {
            if !names.contains(n) {
                return Err(input!("{family}: unknown parameter `{n}`"));
            }
        }
        let mut values = Vec::with_capacity(names.len());
        for name in names {
            let v = params
                .iter()
                .rev()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .or_else(|| family.default_value(name))
                .ok_or_else(|| input!("{family}: missing parameter `{name}`"))?;
            values.push(v);
        }
        family.check(&values)?;
        let mut free_idx = Vec::with_capacity(free.len());
        for f in free {
            let i = names
                .iter()
                .position(|n| n == f)
                .ok_or_else(|| input!("{family}: unknown free parameter `{f}`"))?;
            if free_idx.contains(&i) {
                return Err(input!("{family}: free parameter `{f}` listed twice"));
            }
            free_idx.push(i);
        }
        Ok(KernelDistribution {
            family,
            values,
            free: free_idx,
        })
    }

    /// Like [`new`](Self::new) with the family's default free designation.
    pub fn with_default_free(family: Family, params: &[(&str, f64)]) -> Result<Self> {
        Self::new(family, params, family.default_free())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.family
            .param_names()
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    pub fn params(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.family
            .param_names()
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    pub fn free_params(&self) -> Vec<&'static str> {
        let names = self.family.param_names();
        self.free.iter().map(|&i| names[i]).collect()
    }

    pub fn fixed_params(&self) -> Vec<&'static str> {
        let names = self.family.param_names();
        (0..names.len())
            .filter(|i| !self.free.contains(i))
            .map(|i| names[i])
            .collect()
    }

    pub fn free_values(&self) -> Vec<f64> {
        self.free.iter().map(|&i| self.values[i]).collect()
    }

    /// Returns a copy with one parameter replaced (domain re-checked).
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let i = self
            .family
            .param_names()
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| input!("{}: unknown parameter `{name}`", self.family))?;
        let mut out = self.clone();
        out.values[i] = value;
        out.family.check(&out.values)?;
        Ok(out)
    }

    /// Returns a copy with the free parameters set, in free-list order.
    pub fn with_free(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.free.len() {
            return Err(input!(
                "{}: expected {} free value(s), got {}",
                self.family,
                self.free.len(),
                values.len()
            ));
        }
        let mut out = self.clone();
        for (&i, &v) in self.free.iter().zip(values) {
            out.values[i] = v;
        }
        out.family.check(&out.values)?;
        Ok(out)
    }

    fn v(&self, i: usize) -> f64 {
        self.values[i]
    }

    fn defun(&self) -> DifferentiatedErrorFunction {
        DifferentiatedErrorFunction::new(self.v(0), self.v(1)).expect("checked at construction")
    }

    pub fn is_discrete(&self) -> bool {
        self.family.is_discrete()
    }

    /// Closure of the support, as (lo, hi).
    pub fn support(&self) -> (f64, f64) {
        use Family::*;
        match self.family {
            Poisson | NegativeBinomial => (0.0, f64::INFINITY),
            Logarithmic => (1.0, f64::INFINITY),
            Gamma | Exponential | Weibull => (0.0, f64::INFINITY),
            Pareto1 => (self.v(1), f64::INFINITY),
            Uniform => (self.v(0), self.v(1)),
            Normal | NormalMeanVariance | Laplace | Gumbel | DiscreteLaplace
            | DifferentiatedErrorFunction => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn mean(&self) -> f64 {
        use Family::*;
        match self.family {
            Poisson => self.v(0),
            NegativeBinomial => self.v(0) * self.v(1) / (1.0 - self.v(1)),
            Gamma => self.v(0) * self.v(1),
            Exponential => self.v(0),
            Weibull => self.v(0) * ln_gamma(1.0 + 1.0 / self.v(1)).exp(),
            Pareto1 => {
                let (a, t) = (self.v(0), self.v(1));
                if a > 1.0 {
                    a * t / (a - 1.0)
                } else {
                    f64::INFINITY
                }
            }
            Normal | NormalMeanVariance | Laplace => self.v(0),
            Gumbel => self.v(0) + self.v(1) * 0.577_215_664_901_532_9,
            Logarithmic => {
                let q = self.v(0);
                -q / ((1.0 - q) * (-q).ln_1p())
            }
            DiscreteLaplace | DifferentiatedErrorFunction => 0.0,
            Uniform => 0.5 * (self.v(0) + self.v(1)),
        }
    }

    pub fn variance(&self) -> f64 {
        use Family::*;
        match self.family {
            Poisson => self.v(0),
            NegativeBinomial => {
                let (r, p) = (self.v(0), self.v(1));
                r * p / ((1.0 - p) * (1.0 - p))
            }
            Gamma => self.v(0) * self.v(1) * self.v(1),
            Exponential => self.v(0) * self.v(0),
            Weibull => {
                let (t, k) = (self.v(0), self.v(1));
                let g1 = ln_gamma(1.0 + 1.0 / k).exp();
                let g2 = ln_gamma(1.0 + 2.0 / k).exp();
                t * t * (g2 - g1 * g1)
            }
            Pareto1 => {
                let (a, t) = (self.v(0), self.v(1));
                if a > 2.0 {
                    a * t * t / ((a - 1.0) * (a - 1.0) * (a - 2.0))
                } else {
                    f64::INFINITY
                }
            }
            Normal => self.v(1),
            NormalMeanVariance => self.v(0) * self.v(1),
            Laplace => 2.0 * self.v(1) * self.v(1),
            Gumbel => PI * PI / 6.0 * self.v(1) * self.v(1),
            Logarithmic => {
                let q = self.v(0);
                let l = (-q).ln_1p();
                -q * (q + l) / ((1.0 - q) * (1.0 - q) * l * l)
            }
            DiscreteLaplace => {
                let p = self.v(0);
                2.0 * p / ((1.0 - p) * (1.0 - p))
            }
            Uniform => (self.v(1) - self.v(0)).powi(2) / 12.0,
            DifferentiatedErrorFunction => self.v(0) + self.v(1),
        }
    }

    /// A representative location and width, used to lay out quadrature panels.
    pub fn scale_hint(&self) -> (f64, f64) {
        match self.family {
            Family::Pareto1 => (self.v(1), self.v(1)),
            Family::Uniform => (self.mean(), self.v(1) - self.v(0)),
            _ => {
                let sd = self.variance().sqrt();
                (self.mean(), if sd.is_finite() && sd > 0.0 { sd } else { 1.0 })
            }
        }
    }

    /// Cumulative distribution function. Discrete families use floor semantics.
    pub fn cdf(&self, x: f64) -> f64 {
        use Family::*;
        if x.is_nan() {
            return f64::NAN;
        }
        match self.family {
            Poisson => {
                if x < 0.0 {
                    return 0.0;
                }
                if x.is_infinite() {
                    return 1.0;
                }
                gamma_ur(x.floor() + 1.0, self.v(0))
            }
            NegativeBinomial => {
                if x < 0.0 {
                    return 0.0;
                }
                if x.is_infinite() {
                    return 1.0;
                }
                beta_reg(self.v(0), x.floor() + 1.0, 1.0 - self.v(1))
            }
            Gamma => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma_lr(self.v(0), x / self.v(1))
                }
            }
            Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x / self.v(0)).exp_m1()
                }
            }
            Weibull => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-(x / self.v(0)).powf(self.v(1))).exp_m1()
                }
            }
            Pareto1 => {
                let (a, t) = (self.v(0), self.v(1));
                if x <= t {
                    0.0
                } else {
                    -(a * (t / x).ln()).exp_m1()
                }
            }
            Normal => normal_cdf(x, self.v(0), self.v(1)),
            NormalMeanVariance => normal_cdf(x, self.v(0), self.v(0) * self.v(1)),
            Laplace => {
                let z = (x - self.v(0)) / self.v(1);
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Gumbel => (-(-(x - self.v(0)) / self.v(1)).exp()).exp(),
            Logarithmic => {
                if x < 1.0 {
                    return 0.0;
                }
                let q = self.v(0);
                let norm = -1.0 / (-q).ln_1p();
                let k = x.floor();
                let mut sum = 0.0;
                let mut qn = 1.0;
                let mut n = 1.0;
                while n <= k {
                    qn *= q;
                    let term = norm * qn / n;
                    sum += term;
                    if term < 1e-16 * sum {
                        break;
                    }
                    n += 1.0;
                }
                sum.min(1.0)
            }
            DiscreteLaplace => {
                let p = self.v(0);
                if x.is_infinite() {
                    return if x > 0.0 { 1.0 } else { 0.0 };
                }
                let y = x.floor();
                if y < 0.0 {
                    p.powf(-y) / (1.0 + p)
                } else {
                    1.0 - p.powf(y + 1.0) / (1.0 + p)
                }
            }
            Uniform => ((x - self.v(0)) / (self.v(1) - self.v(0))).clamp(0.0, 1.0),
            DifferentiatedErrorFunction => self.defun().cdf(x),
        }
    }

    /// Natural log of the PMF (discrete) or PDF (continuous); −∞ off support.
    pub fn ln_density(&self, x: f64) -> f64 {
        use Family::*;
        let ninf = f64::NEG_INFINITY;
        if self.family.is_discrete() && x != x.floor() {
            return ninf;
        }
        match self.family {
            Poisson => {
                if x < 0.0 {
                    return ninf;
                }
                let l = self.v(0);
                x * l.ln() - l - ln_gamma(x + 1.0)
            }
            NegativeBinomial => {
                if x < 0.0 {
                    return ninf;
                }
                let (r, p) = (self.v(0), self.v(1));
                ln_gamma(r + x) - ln_gamma(r) - ln_gamma(x + 1.0) + r * (-p).ln_1p() + x * p.ln()
            }
            Logarithmic => {
                if x < 1.0 {
                    return ninf;
                }
                let q = self.v(0);
                x * q.ln() - x.ln() - (-(-q).ln_1p()).ln()
            }
            DiscreteLaplace => {
                let p = self.v(0);
                ((1.0 - p) / (1.0 + p)).ln() + x.abs() * p.ln()
            }
            Gamma => gamma_ln_pdf(x, self.v(0), self.v(1)),
            Exponential => gamma_ln_pdf(x, 1.0, self.v(0)),
            Weibull => {
                let (t, k) = (self.v(0), self.v(1));
                if x < 0.0 || (x == 0.0 && k > 1.0) {
                    return ninf;
                }
                let z = x / t;
                (k / t).ln() + (k - 1.0) * z.ln() - z.powf(k)
            }
            Pareto1 => {
                let (a, t) = (self.v(0), self.v(1));
                if x < t {
                    return ninf;
                }
                a.ln() + a * t.ln() - (a + 1.0) * x.ln()
            }
            Normal => normal_ln_pdf(x, self.v(0), self.v(1)),
            NormalMeanVariance => normal_ln_pdf(x, self.v(0), self.v(0) * self.v(1)),
            Laplace => {
                let s = self.v(1);
                -(x - self.v(0)).abs() / s - (2.0 * s).ln()
            }
            Gumbel => {
                let z = (x - self.v(0)) / self.v(1);
                -z - (-z).exp() - self.v(1).ln()
            }
            Uniform => {
                let (a, b) = (self.v(0), self.v(1));
                if x < a || x > b {
                    ninf
                } else {
                    -(b - a).ln()
                }
            }
            DifferentiatedErrorFunction => self.defun().ln_pdf(x),
        }
    }

    /// PMF at integer points for discrete families, PDF otherwise.
    pub fn density(&self, x: f64) -> f64 {
        match self.family {
            Family::DifferentiatedErrorFunction => self.defun().pdf(x),
            Family::Uniform => {
                let (a, b) = (self.v(0), self.v(1));
                if x < a || x > b {
                    0.0
                } else {
                    1.0 / (b - a)
                }
            }
            _ => self.ln_density(x).exp(),
        }
    }

    /// Convergence strip of the moment-generating function.
    pub fn mgf_strip(&self) -> Strip {
        use Family::*;
        match self.family {
            Poisson | Normal | NormalMeanVariance | Uniform | DifferentiatedErrorFunction => {
                Strip::ALL
            }
            NegativeBinomial => Strip::open(f64::NEG_INFINITY, -self.v(1).ln()),
            Gamma => Strip::open(f64::NEG_INFINITY, 1.0 / self.v(1)),
            Exponential => Strip::open(f64::NEG_INFINITY, 1.0 / self.v(0)),
            Weibull => {
                let tau = self.v(1);
                if tau > 1.0 {
                    Strip::ALL
                } else if tau == 1.0 {
                    Strip::open(f64::NEG_INFINITY, 1.0 / self.v(0))
                } else {
                    Strip {
                        hi_closed: true,
                        ..Strip::open(f64::NEG_INFINITY, 0.0)
                    }
                }
            }
            Pareto1 => Strip {
                hi_closed: true,
                ..Strip::open(f64::NEG_INFINITY, 0.0)
            },
            Laplace => Strip::open(-1.0 / self.v(1), 1.0 / self.v(1)),
            Gumbel => Strip::open(f64::NEG_INFINITY, 1.0 / self.v(1)),
            Logarithmic => Strip::open(f64::NEG_INFINITY, -self.v(0).ln()),
            DiscreteLaplace => {
                let h = -self.v(0).ln();
                Strip::open(-h, h)
            }
        }
    }

    /// Moment-generating function E[e^{sX}].
    pub fn mgf(&self, s: f64) -> Result<f64> {
        use Family::*;
        let strip = self.mgf_strip();
        if !strip.contains(s) {
            return Err(Error::Divergence {
                what: format!("{} MGF", self.family),
                arg: s,
                strip: strip.to_string(),
            });
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let value = match self.family {
            Poisson => (self.v(0) * s.exp_m1()).exp(),
            NegativeBinomial => {
                // ((1-p)/(1-p e^s))^r written through the odds p/(1-p)
                let (r, p) = (self.v(0), self.v(1));
                let odds = p / (1.0 - p);
                (-r * (-odds * s.exp_m1()).ln_1p()).exp()
            }
            Gamma => (-self.v(0) * (-self.v(1) * s).ln_1p()).exp(),
            Exponential => 1.0 / (1.0 - self.v(0) * s),
            Weibull => {
                if s < 0.0 {
                    return self.laplace_transform(-s);
                }
                weibull_mgf_series(self.v(0), self.v(1), s)?
            }
            Pareto1 => return self.laplace_transform(-s),
            Normal => (self.v(0) * s + 0.5 * self.v(1) * s * s).exp(),
            NormalMeanVariance => (self.v(0) * (s + 0.5 * self.v(1) * s * s)).exp(),
            Laplace => {
                let sig = self.v(1);
                (self.v(0) * s).exp() / (1.0 - sig * sig * s * s)
            }
            Gumbel => (ln_gamma(1.0 - self.v(1) * s) + self.v(0) * s).exp(),
            Logarithmic => {
                let q = self.v(0);
                (-q * s.exp()).ln_1p() / (-q).ln_1p()
            }
            DiscreteLaplace => {
                // 1 - 2p cosh s + p² = (1-p)² - 4p sinh²(s/2)
                let p = self.v(0);
                let sh = (0.5 * s).sinh();
                let d = (1.0 - p) * (1.0 - p);
                d / (d - 4.0 * p * sh * sh)
            }
            Uniform => {
                let (a, b) = (self.v(0), self.v(1));
                let w = (b - a) * s;
                (a * s).exp() * w.exp_m1() / w
            }
            DifferentiatedErrorFunction => return self.defun().mgf(s),
        };
        if !value.is_finite() {
            return Err(Error::Range(format!(
                "{} MGF overflows at s={s}",
                self.family
            )));
        }
        Ok(value)
    }

    /// Laplace transform E[e^{−sX}] for families supported on the positive half-line.
    pub fn laplace_transform(&self, s: f64) -> Result<f64> {
        use Family::*;
        if !self.family.has_laplace_transform() {
            return Err(Error::Unsupported(format!(
                "Laplace transform of {} (support is not the positive half-line)",
                self.family
            )));
        }
        if !(s >= 0.0) {
            return Err(domain!("Laplace transform argument must be >= 0, got {s}"));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        let cfg = QuadratureConfig::default();
        Ok(match self.family {
            Gamma => (-self.v(0) * (self.v(1) * s).ln_1p()).exp(),
            Exponential => 1.0 / (1.0 + self.v(0) * s),
            Weibull => {
                // E[e^{-sX}] with X = θ U^{1/τ}, U ~ Exp(1)
                let (t, k) = (self.v(0), self.v(1));
                let c = s * t;
                let r = integrate(
                    |u: f64| (-c * u.powf(1.0 / k) - u).exp(),
                    0.0,
                    60.0,
                    1e-16,
                    1e-14,
                    cfg.max_subdivisions,
                );
                r.value
            }
            Pareto1 => {
                // x = θ/v: α ∫₀¹ v^{α-1} e^{-sθ/v} dv
                let (a, t) = (self.v(0), self.v(1));
                let c = s * t;
                let r = integrate(
                    |v: f64| {
                        if v <= 0.0 {
                            0.0
                        } else {
                            a * ((a - 1.0) * v.ln() - c / v).exp()
                        }
                    },
                    0.0,
                    1.0,
                    1e-16,
                    1e-14,
                    cfg.max_subdivisions,
                );
                r.value
            }
            _ => unreachable!(),
        })
    }

    /// Characteristic function E[e^{iωX}].
    pub fn cf(&self, omega: f64) -> Complex64 {
        use Family::*;
        let one = Complex64::new(1.0, 0.0);
        if omega == 0.0 {
            return one;
        }
        let iw = Complex64::new(0.0, omega);
        match self.family {
            Poisson => (self.v(0) * (iw.exp() - 1.0)).exp(),
            NegativeBinomial => {
                let (r, p) = (self.v(0), self.v(1));
                (r * ((-p).ln_1p() - (one - p * iw.exp()).ln())).exp()
            }
            Gamma => (-self.v(0) * (one - self.v(1) * iw).ln()).exp(),
            Exponential => one / (one - self.v(0) * iw),
            Weibull => {
                let (t, k) = (self.v(0), self.v(1));
                let c = omega * t;
                let cfg = QuadratureConfig::default();
                let re = integrate(
                    |u: f64| (c * u.powf(1.0 / k)).cos() * (-u).exp(),
                    0.0,
                    60.0,
                    1e-15,
                    1e-13,
                    cfg.max_subdivisions,
                );
                let im = integrate(
                    |u: f64| (c * u.powf(1.0 / k)).sin() * (-u).exp(),
                    0.0,
                    60.0,
                    1e-15,
                    1e-13,
                    cfg.max_subdivisions,
                );
                Complex64::new(re.value, im.value)
            }
            Pareto1 => {
                let (a, t) = (self.v(0), self.v(1));
                let cfg = QuadratureConfig {
                    abs_tol: 1e-13,
                    rel_tol: 1e-12,
                    ..QuadratureConfig::default()
                };
                let pdf = |x: f64| a * (a * t.ln() - (a + 1.0) * x.ln()).exp();
                let env = |x: f64| pdf(x);
                let re = fourier_integral(|x| (omega * x).cos() * pdf(x), t, omega, env, t, &cfg);
                let im = fourier_integral(|x| (omega * x).sin() * pdf(x), t, omega, env, t, &cfg);
                match (re, im) {
                    (Ok(re), Ok(im)) => Complex64::new(re.value, im.value),
                    _ => Complex64::new(f64::NAN, f64::NAN),
                }
            }
            Normal => (iw * self.v(0) - 0.5 * self.v(1) * omega * omega).exp(),
            NormalMeanVariance => {
                let m = self.v(0);
                (iw * m - 0.5 * m * self.v(1) * omega * omega).exp()
            }
            Laplace => {
                let s = self.v(1);
                (iw * self.v(0)).exp() / (1.0 + s * s * omega * omega)
            }
            Gumbel => {
                (ln_gamma_complex(one - self.v(1) * iw) + iw * self.v(0)).exp()
            }
            Logarithmic => {
                let q = self.v(0);
                (one - q * iw.exp()).ln() / (-q).ln_1p()
            }
            DiscreteLaplace => {
                let p = self.v(0);
                let sh = (0.5 * omega).sin();
                let d = (1.0 - p) * (1.0 - p);
                Complex64::new(d / (d + 4.0 * p * sh * sh), 0.0)
            }
            Uniform => {
                let (a, b) = (self.v(0), self.v(1));
                let w = (b - a) * omega;
                // (e^{iw} - 1)/(iw)
                let ratio = if w.abs() < 1e-4 {
                    Complex64::new(1.0 - w * w / 6.0, w / 2.0 - w * w * w / 24.0)
                } else {
                    (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w)
                };
                (iw * a).exp() * ratio
            }
            DifferentiatedErrorFunction => Complex64::new(self.defun().cf(omega), 0.0),
        }
    }

    /// Draws `n` values deterministically from `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(input!("sample size must be >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n).map(|_| self.draw(&mut rng)).collect())
    }

    /// One draw using the caller's generator.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use Family::*;
        match self.family {
            Poisson => rd::Poisson::new(self.v(0)).expect("λ > 0").sample(rng),
            NegativeBinomial => {
                let (r, p) = (self.v(0), self.v(1));
                let lambda = rd::Gamma::new(r, p / (1.0 - p)).expect("valid").sample(rng);
                if lambda > 0.0 {
                    rd::Poisson::new(lambda).expect("λ > 0").sample(rng)
                } else {
                    0.0
                }
            }
            Gamma => rd::Gamma::new(self.v(0), self.v(1)).expect("valid").sample(rng),
            Exponential => rd::Exp::new(1.0 / self.v(0)).expect("valid").sample(rng),
            Weibull => rd::Weibull::new(self.v(0), self.v(1)).expect("valid").sample(rng),
            Pareto1 => rd::Pareto::new(self.v(1), self.v(0)).expect("valid").sample(rng),
            Normal => rd::Normal::new(self.v(0), self.v(1).sqrt()).expect("valid").sample(rng),
            NormalMeanVariance => rd::Normal::new(self.v(0), (self.v(0) * self.v(1)).sqrt())
                .expect("valid")
                .sample(rng),
            Laplace => {
                let u: f64 = rng.random::<f64>() - 0.5;
                self.v(0) - self.v(1) * u.signum() * (-2.0 * u.abs()).ln_1p()
            }
            Gumbel => rd::Gumbel::new(self.v(0), self.v(1)).expect("valid").sample(rng),
            Logarithmic => {
                let q = self.v(0);
                let mut u: f64 = rng.random();
                let mut k = 1.0;
                let mut pk = -q / (-q).ln_1p();
                while u > pk && pk > 0.0 {
                    u -= pk;
                    k += 1.0;
                    pk *= q * (k - 1.0) / k;
                }
                k
            }
            DiscreteLaplace => {
                let g = rd::Geometric::new(1.0 - self.v(0)).expect("valid");
                g.sample(rng) as f64 - g.sample(rng) as f64
            }
            Uniform => rd::Uniform::new(self.v(0), self.v(1)).expect("a < b").sample(rng),
            DifferentiatedErrorFunction => self.defun().draw(rng),
        }
    }

    pub fn family_tags(&self) -> FamilyTag {
        tags::family_tags(self)
    }
}

fn normal_cdf(x: f64, m: f64, var: f64) -> f64 {
    0.5 * crate::special::erfc(-(x - m) / (2.0 * var).sqrt())
}

fn normal_ln_pdf(x: f64, m: f64, var: f64) -> f64 {
    let d = x - m;
    -0.5 * d * d / var - 0.5 * (2.0 * PI * var).ln()
}

fn gamma_ln_pdf(x: f64, r: f64, theta: f64) -> f64 {
    if x < 0.0 {
        return f64::NEG_INFINITY;
    }
    if x == 0.0 {
        return if r == 1.0 {
            -theta.ln()
        } else if r < 1.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
    }
    (r - 1.0) * x.ln() - x / theta - ln_gamma(r) - r * theta.ln()
}

/// Σₙ (θs)ⁿ Γ(1 + n/τ) / n!, entire for τ > 1.
fn weibull_mgf_series(theta: f64, tau: f64, s: f64) -> Result<f64> {
    if tau == 1.0 {
        return Ok(1.0 / (1.0 - theta * s));
    }
    let lc = (theta * s).ln();
    let mut sum = 1.0;
    let mut prev = 1.0;
    for n in 1..200_000u32 {
        let nf = n as f64;
        let term = (nf * lc + ln_gamma(1.0 + nf / tau) - ln_gamma(nf + 1.0)).exp();
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Range(format!("weibull MGF overflows at s={s}")));
        }
        if term < 1e-17 * sum && term < prev {
            return Ok(sum);
        }
        prev = term;
    }
    Err(Error::Convergence(format!("weibull MGF series at s={s}")))
}
