//! Continuous mixtures F(x) = ∫ F(x; α) g(α) dα over a kernel's single free
//! parameter α.
//!
//! Mixing densities come from named presets (any continuous kernel family,
//! `lognormal`, optionally truncated with `lo=`/`hi=`) or from an expression
//! in `x` (`expr:2*x*exp(-x^2),lo=0,hi=inf`). Infinite domains are truncated
//! where the density drops below 1e-14, and normalization over the truncated
//! domain is checked to 1e-8.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, input, Error, Result};
use crate::expr::Expr;
use crate::kernels::spec::{parse_number, split_spec};
use crate::kernels::KernelDistribution;
use crate::transforms::quad::{gauss_kronrod21, integrate};
use crate::transforms::QuadratureConfig;

/// Density below which an infinite domain is cut off.
pub const TRUNCATION_DENSITY: f64 = 1e-14;
/// Allowed normalization defect.
pub const NORMALIZATION_TOL: f64 = 1e-8;
const MAX_DOUBLINGS: usize = 200;
const SAMPLING_CELLS: usize = 4096;

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A probability density over a scalar parameter.
#[derive(Clone)]
pub struct MixingDensity {
    lo: f64,
    hi: f64,
    density: DensityFn,
    description: String,
    mass: f64,
}

impl fmt::Debug for MixingDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MixingDensity")
            .field("description", &self.description)
            .field("domain", &(self.lo, self.hi))
            .field("mass", &self.mass)
            .finish()
    }
}

impl MixingDensity {
    /// Wraps `density` on (lo, hi). Infinite ends are truncated by geometric
    /// search outward from `hint = (centre, width)`. Fails unless the
    /// truncated density integrates to 1 within 1e-8.
    pub fn new<F>(lo: f64, hi: f64, density: F, description: impl Into<String>, hint: Option<(f64, f64)>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let m = Self::unchecked(lo, hi, Arc::new(density), description.into(), hint)?;
        m.check_normalized()?;
        Ok(m)
    }

    fn unchecked(lo: f64, hi: f64, density: DensityFn, description: String, hint: Option<(f64, f64)>) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(input!("mixing domain must satisfy lo < hi, got ({lo}, {hi})"));
        }
        let (c, w) = hint.unwrap_or_else(|| {
            if lo.is_finite() && hi.is_finite() {
                (0.5 * (lo + hi), hi - lo)
            } else if lo.is_finite() {
                (lo + 1.0, 1.0)
            } else if hi.is_finite() {
                (hi - 1.0, 1.0)
            } else {
                (0.0, 1.0)
            }
        });
        let w = if w > 0.0 && w.is_finite() { w } else { 1.0 };
        let c = if c.is_finite() { c.clamp(lo, hi) } else { lo.max(-1.0).min(hi) };
        let f = |x: f64| density(x);
        let new_hi = if hi.is_finite() { hi } else { truncate(&f, c, w)? };
        let new_lo = if lo.is_finite() { lo } else { truncate(&f, c, -w)? };
        let mass = integrate(&f, new_lo, new_hi, 1e-13, 1e-12, 4000).value;
        Ok(MixingDensity {
            lo: new_lo,
            hi: new_hi,
            density,
            description,
            mass,
        })
    }

    fn check_normalized(&self) -> Result<()> {
        if (self.mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(input!(
                "mixing density `{}` integrates to {} over [{}, {}], not 1",
                self.description,
                self.mass,
                self.lo,
                self.hi
            ));
        }
        Ok(())
    }

    /// A continuous kernel used as a mixing density.
    pub fn from_kernel(k: &KernelDistribution) -> Result<Self> {
        if k.is_discrete() {
            return Err(input!("mixing density must be continuous, got {}", k.family()));
        }
        let (lo, hi) = k.support();
        let kk = k.clone();
        Self::new(lo, hi, move |x| kk.density(x), k.to_string(), Some(k.scale_hint()))
    }

    /// Parses `family:params[,lo=..][,hi=..]`, `lognormal:mu=..,sigma=..`
    /// or `expr:<expression in x>,lo=..,hi=..`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (head, toks) = split_spec(spec)?;
        let mut lo = None;
        let mut hi = None;
        let mut rest = Vec::new();
        for t in toks {
            match t.split_once('=') {
                Some(("lo", v)) => lo = Some(parse_number(t, v)?),
                Some(("hi", v)) => hi = Some(parse_number(t, v)?),
                _ => rest.push(t),
            }
        }
        let base = match head.to_ascii_lowercase().as_str() {
            "expr" => {
                let src = rest.join(",");
                let e = Expr::parse(&src)?;
                if let Some(v) = e.variables().into_iter().find(|v| v != "x") {
                    return Err(input!("mixing expression may only use `x`, found `{v}`"));
                }
                let (l, h) = (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY));
                return Self::new(l, h, move |x| expr_density(&e, x), spec.trim(), None);
            }
            "lognormal" => {
                let mut mu: f64 = 0.0;
                let mut sigma: f64 = 1.0;
                for t in &rest {
                    match t.split_once('=') {
                        Some(("mu", v)) => mu = parse_number(t, v)?,
                        Some(("sigma", v)) => sigma = parse_number(t, v)?,
                        _ => return Err(input!("lognormal: unexpected `{t}`")),
                    }
                }
                if !(sigma > 0.0) {
                    return Err(domain!("lognormal: sigma must be > 0, got {sigma}"));
                }
                let src = format!(
                    "exp(-(ln(x) - {mu})^2 / (2*{sigma}^2)) / (x * {sigma} * sqrt(2*pi))"
                );
                let e = Expr::parse(&src)?;
                let median = mu.exp();
                Self::new(
                    0.0,
                    f64::INFINITY,
                    move |x| if x > 0.0 { expr_density(&e, x) } else { 0.0 },
                    format!("lognormal:mu={mu},sigma={sigma}"),
                    Some((median, median * sigma.max(0.1))),
                )?
            }
            _ => {
                let k: KernelDistribution = format!("{head}:{}", rest.join(",")).parse()?;
                Self::from_kernel(&k)?
            }
        };
        if lo.is_some() || hi.is_some() {
            base.truncated(lo.unwrap_or(base.lo), hi.unwrap_or(base.hi))
        } else {
            Ok(base)
        }
    }

    /// Restriction to [lo, hi] ∩ domain, renormalized.
    pub fn truncated(&self, lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = (lo.max(self.lo), hi.min(self.hi));
        if !(lo < hi) {
            return Err(input!("truncation [{lo}, {hi}] leaves no mass"));
        }
        let inner = self.density.clone();
        let mass = integrate(|x| inner(x), lo, hi, 1e-14, 1e-13, 4000).value;
        if !(mass > 0.0) {
            return Err(input!("truncation [{lo}, {hi}] leaves no mass"));
        }
        let d: DensityFn = Arc::new(move |x| inner(x) / mass);
        let m = Self::unchecked(lo, hi, d, format!("{} on [{lo}, {hi}]", self.description), None)?;
        m.check_normalized()?;
        Ok(m)
    }

    /// Density of β = η(α) for strictly monotone η, g(η⁻¹(β)) / |η′(η⁻¹(β))|,
    /// with η′ from central differences at h = 1e-6·max(1, |α|). The result
    /// is not required to be normalized; see [`mass`](Self::mass).
    pub fn pushforward<E, I>(&self, eta: E, eta_inv: I, description: impl Into<String>) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (b0, b1) = (eta(self.lo), eta(self.hi));
        if !(b0.is_finite() && b1.is_finite()) || b0 == b1 {
            return Err(domain!(
                "pushforward: η maps [{}, {}] to [{b0}, {b1}]",
                self.lo,
                self.hi
            ));
        }
        let (lo, hi) = (b0.min(b1), b0.max(b1));
        let g = self.density.clone();
        let (alo, ahi) = (self.lo, self.hi);
        let d: DensityFn = Arc::new(move |beta| {
            let a = eta_inv(beta);
            if !(a > alo && a < ahi) {
                return 0.0;
            }
            let jac = central_difference(&eta, a, alo, ahi);
            g(a) / jac.abs()
        });
        Self::unchecked(lo, hi, d, description.into(), None)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            (self.density)(x)
        }
    }

    /// Effective (truncated) domain.
    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// ∫ density over the effective domain.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// ∫ f(α) g(α) dα over the domain. Evaluation errors from `f` abort the
    /// integral and are returned.
    pub fn integrate_against<F>(&self, mut f: F, cfg: &QuadratureConfig) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut failure = None;
        let r = integrate(
            |a: f64| {
                if failure.is_some() {
                    return 0.0;
                }
                match f(a) {
                    Ok(v) => v * (self.density)(a),
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                }
            },
            self.lo,
            self.hi,
            1e-2 * cfg.abs_tol,
            1e-2 * cfg.rel_tol,
            cfg.max_subdivisions,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if !r.converged {
            return Err(Error::Convergence(format!(
                "mixing integral over [{}, {}] (error estimate {:e})",
                self.lo, self.hi, r.abs_error
            )));
        }
        Ok(r.value)
    }

    /// Cumulative table for inverse-CDF sampling.
    fn cdf_table(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / SAMPLING_CELLS as f64;
        let mut g = |x: f64| (self.density)(x);
        let mut acc = 0.0;
        let mut table = Vec::with_capacity(SAMPLING_CELLS + 1);
        table.push(0.0);
        for i in 0..SAMPLING_CELLS {
            let a = self.lo + i as f64 * h;
            let (v, _) = gauss_kronrod21(&mut g, a, a + h);
            acc += v.max(0.0);
            table.push(acc);
        }
        table
    }

    fn invert(&self, table: &[f64], u: f64) -> f64 {
        let target = u * table[table.len() - 1];
        let i = table.partition_point(|&c| c < target).clamp(1, table.len() - 1);
        let (c0, c1) = (table[i - 1], table[i]);
        let h = (self.hi - self.lo) / SAMPLING_CELLS as f64;
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        self.lo + (i as f64 - 1.0 + frac) * h
    }
}

fn expr_density(e: &Expr, x: f64) -> f64 {
    match e.eval(&[("x", x)]) {
        Ok(v) if v.is_finite() && v > 0.0 => v,
        _ => 0.0,
    }
}

fn central_difference<E: Fn(f64) -> f64>(eta: &E, a: f64, lo: f64, hi: f64) -> f64 {
    let h = 1e-6 * a.abs().max(1.0);
    if a - h > lo && a + h < hi {
        (eta(a + h) - eta(a - h)) / (2.0 * h)
    } else if a + h < hi {
        (eta(a + h) - eta(a)) / h
    } else {
        (eta(a) - eta(a - h)) / h
    }
}

/// Outward search from `c` in steps `w`, 2w, 4w, … for the point where the
/// density has fallen below the truncation level, refined by bisection.
fn truncate<F: Fn(f64) -> f64>(f: &F, c: f64, w: f64) -> Result<f64> {
    let mut prev = c;
    let mut prev_v = f(c);
    let mut step = w;
    for _ in 0..MAX_DOUBLINGS {
        let x = c + step;
        let v = f(x);
        if v < TRUNCATION_DENSITY && v <= prev_v {
            // the crossing lies between prev and x
            let (mut a, mut b) = (prev, x);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if f(m) < TRUNCATION_DENSITY {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(b);
        }
        prev = x;
        prev_v = v;
        step *= 2.0;
    }
    Err(input!(
        "mixing density does not fall below {TRUNCATION_DENSITY} within reach of {c}"
    ))
}

/// A kernel with one free parameter mixed over a density on that parameter.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    kernel: KernelDistribution,
    mixing: MixingDensity,
}

impl MixtureModel {
    pub fn new(kernel: KernelDistribution, mixing: MixingDensity) -> Result<Self> {
        let free = kernel.free_params();
        if free.len() != 1 {
            return Err(input!(
                "mixing needs exactly one free parameter, {} has {:?}",
                kernel.family(),
                free
            ));
        }
        let dom = kernel
            .family()
            .param_domain(free[0])
            .expect("catalogued parameter");
        let (lo, hi) = mixing.domain();
        if lo < dom.lo || hi > dom.hi {
            return Err(domain!(
                "mixing domain [{lo}, {hi}] is not inside the domain {dom} of `{}`",
                free[0]
            ));
        }
        Ok(MixtureModel { kernel, mixing })
    }

    pub fn kernel(&self) -> &KernelDistribution {
        &self.kernel
    }

    pub fn mixing(&self) -> &MixingDensity {
        &self.mixing
    }

    pub fn free_param(&self) -> &'static str {
        self.kernel.free_params()[0]
    }

    fn at(&self, alpha: f64) -> Result<KernelDistribution> {
        self.kernel.with_free(&[alpha])
    }
}

/// Mixture CDF ∫ F(x; α) g(α) dα.
pub fn mixture_cdf(mm: &MixtureModel, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if x.is_nan() {
        return Err(input!("x must not be NaN"));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let v = mm.mixing.integrate_against(|a| Ok(mm.at(a)?.cdf(x)), cfg)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Mixture PMF (discrete kernels) or PDF ∫ f(x; α) g(α) dα.
pub fn mixture_density(mm: &MixtureModel, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let v = mm.mixing.integrate_against(|a| Ok(mm.at(a)?.density(x)), cfg)?;
    Ok(v.max(0.0))
}

/// Mixture MGF ∫ M(s; α) g(α) dα. Every quadrature node must lie inside the
/// kernel's convergence strip at s.
pub fn mixture_mgf(mm: &MixtureModel, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let name = mm.free_param();
    mm.mixing.integrate_against(
        |a| {
            let k = mm.at(a)?;
            k.mgf(s).map_err(|e| match e {
                Error::Divergence { strip, .. } => domain!(
                    "s={s} is outside the MGF strip {strip} of {} at node {name}={a}",
                    k.family()
                ),
                other => other,
            })
        },
        cfg,
    )
}

/// Two-stage sampling: α from the mixing density by table inversion, then
/// X | α from the kernel.
pub fn sample_mixture(mm: &MixtureModel, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(input!("sample size must be >= 1"));
    }
    let table = mm.mixing.cdf_table();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let alpha = mm.mixing.invert(&table, u);
        out.push(mm.at(alpha)?.draw(&mut rng));
    }
    Ok(out)
}
