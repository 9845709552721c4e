//! Generating-function accessibility between kernel families.
//!
//! A mapping pairs a source kernel X|α with a target kernel Y|β through a
//! parameter map β = η(α) and an argument map t = ξ(s) such that
//! M_Y(ξ(s); η(α)) = M_X(s; α) for s in [0, ε₁). All four maps and ε₁ are
//! [`Expr`]s: η and ε₁ see the source parameters, η⁻¹ sees the target
//! parameters, ξ sees `s` and ξ⁻¹ sees `t`. Fixed parameters of both kernels
//! are visible everywhere and share one namespace (see
//! [`AccessibilityMapping::with_fixed`]).
//!
//! One-to-one-ness is only ever checked on the sampled grid.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{domain, input, Error, Result};
use crate::expr::Expr;
use crate::kernels::{KernelDistribution, Tag, Verdict};
use crate::mixtures::{mixture_mgf, MixingDensity, MixtureModel, NORMALIZATION_TOL};
use crate::transforms::QuadratureConfig;

/// Tolerance for the round trips η⁻¹∘η, η∘η⁻¹, ξ⁻¹∘ξ and for ξ(0) = 0.
pub const ROUND_TRIP_TOL: f64 = 1e-12;
/// Relative change of a finite-difference Jacobian under step halving above
/// which a report carries a warning.
pub const JACOBIAN_WARN: f64 = 1e-4;
const GRID_NOTE: &str = "one-to-one is checked by monotonicity on the sampled grid only";

/// One row of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    pub passed: bool,
    /// Grid point attaining the maximum residual.
    pub worst: String,
}

impl Check {
    fn new(name: &str, tol: f64) -> Self {
        Check {
            name: name.to_string(),
            max_residual: 0.0,
            tol,
            passed: true,
            worst: String::new(),
        }
    }

    fn record(&mut self, residual: f64, at: impl FnOnce() -> String) {
        let r = if residual.is_nan() { f64::INFINITY } else { residual };
        if r > self.max_residual || (self.worst.is_empty() && r >= self.max_residual) {
            self.max_residual = r;
            self.worst = at();
        }
        self.passed = self.max_residual <= self.tol;
    }

    fn fail(&mut self, at: impl FnOnce() -> String) {
        self.record(f64::INFINITY, at);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub max_abs_residual: f64,
    pub passed: bool,
    pub grid: String,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(checks: Vec<Check>, grid: String, notes: Vec<String>) -> Self {
        let max_abs_residual = checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
        let passed = checks.iter().all(|c| c.passed);
        VerificationReport {
            checks,
            max_abs_residual,
            passed,
            grid,
            notes,
        }
    }

    /// Combines reports check by check, keeping the worst residual of each.
    pub fn merge(reports: Vec<VerificationReport>) -> Self {
        let mut checks: Vec<Check> = Vec::new();
        let mut grids = Vec::new();
        let mut notes: Vec<String> = Vec::new();
        for r in reports {
            for c in r.checks {
                match checks.iter_mut().find(|k| k.name == c.name) {
                    Some(k) => {
                        if c.max_residual > k.max_residual {
                            k.max_residual = c.max_residual;
                            k.worst = c.worst;
                        }
                        k.tol = k.tol.min(c.tol);
                        k.passed = k.passed && c.passed;
                    }
                    None => checks.push(c),
                }
            }
            grids.push(r.grid);
            for n in r.notes {
                if !notes.contains(&n) {
                    notes.push(n);
                }
            }
        }
        Self::new(checks, grids.join("; "), notes)
    }

    pub fn check(&self, name_prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(name_prefix))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "{status} {}: max residual {:e} (tol {:e})", c.name, c.max_residual, c.tol)?;
            if !c.worst.is_empty() {
                write!(f, " at {}", c.worst)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "grid: {}", self.grid)?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "{}", if self.passed { "passed" } else { "failed" })
    }
}

/// Argument grid for the MGF identity.
#[derive(Debug, Clone, PartialEq)]
pub enum SGrid {
    Points(Vec<f64>),
    /// `points` evenly spaced values on [0, fraction·ε₁(α)], per α.
    Scaled { points: usize, fraction: f64 },
}

impl SGrid {
    /// 50 points on [0, 0.9·ε₁].
    pub fn standard() -> Self {
        SGrid::Scaled {
            points: 50,
            fraction: 0.9,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SGrid::Points(p) if p.is_empty() => Err(input!("s grid is empty")),
            SGrid::Points(p) if p.iter().any(|s| !s.is_finite()) => {
                Err(input!("s grid contains a non-finite value"))
            }
            SGrid::Scaled { points: 0, .. } => Err(input!("s grid needs at least one point")),
            SGrid::Scaled { fraction, .. } if !(*fraction > 0.0 && *fraction < 1.0) => {
                Err(input!("s grid fraction must lie in (0, 1), got {fraction}"))
            }
            _ => Ok(()),
        }
    }

    /// Grid values below `eps`; points outside [0, eps) are a domain error.
    fn values(&self, eps: f64, at: &str) -> Result<Vec<f64>> {
        match self {
            SGrid::Points(p) => {
                for &s in p {
                    if !(s >= 0.0 && s < eps) {
                        return Err(domain!("s={s} is outside [0, ε₁={eps}) at {at}"));
                    }
                }
                Ok(p.clone())
            }
            SGrid::Scaled { points, fraction } => {
                if !eps.is_finite() {
                    return Err(domain!("ε₁ is not finite at {at}; give explicit s points"));
                }
                let top = fraction * eps;
                let n = *points;
                Ok((0..n)
                    .map(|k| if n == 1 { 0.0 } else { top * k as f64 / (n - 1) as f64 })
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Origin {
    /// ε₁ given directly over the source parameters.
    Given(Expr),
    /// Roles swapped: ε₁(β) = ξ(ε₁(η⁻¹(β))) of the original mapping.
    Reversed(Box<AccessibilityMapping>),
}

/// A pair (η, ξ) carrying source-kernel MGFs onto target-kernel MGFs.
#[derive(Debug, Clone)]
pub struct AccessibilityMapping {
    name: String,
    source: KernelDistribution,
    target: KernelDistribution,
    eta: Vec<Expr>,
    eta_inv: Vec<Expr>,
    xi: Expr,
    xi_inv: Expr,
    origin: Origin,
    /// Argument names of ξ and ξ⁻¹: ("s", "t"), exchanged when reversed.
    args: (&'static str, &'static str),
    verdict: Option<Verdict>,
    grid: Vec<Vec<f64>>,
    fixed_variants: Vec<(String, Vec<f64>)>,
}

fn parse_all(srcs: &[&str]) -> Result<Vec<Expr>> {
    srcs.iter().map(|s| Expr::parse(s)).collect()
}

/// Names visible to an expression evaluated on the `own` side: every
/// parameter of `own`, plus the fixed parameters of `other`.
fn side_names(own: &KernelDistribution, other: &KernelDistribution) -> Vec<&'static str> {
    let mut names: Vec<&'static str> = own.family().param_names().to_vec();
    for n in other.fixed_params() {
        if !names.contains(&n) {
            names.push(n);
        }
    }
    names
}

fn fixed_names(a: &KernelDistribution, b: &KernelDistribution) -> Vec<&'static str> {
    let mut names = a.fixed_params();
    for n in b.fixed_params() {
        if !names.contains(&n) {
            names.push(n);
        }
    }
    names
}

fn check_vars(e: &Expr, allowed: &[&str], role: &str) -> Result<()> {
    match e.variables().into_iter().find(|v| !allowed.contains(&v.as_str())) {
        Some(v) => Err(input!(
            "{role} `{e}` uses `{v}`; allowed names are {}",
            allowed.join(", ")
        )),
        None => Ok(()),
    }
}

fn fmt_point(names: &[&str], values: &[f64]) -> String {
    names
        .iter()
        .zip(values)
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

impl AccessibilityMapping {
    /// Builds a mapping from expression sources. `eta` has one entry per
    /// source free parameter and yields the target free parameters in the
    /// target's free order; `eta_inv` is the reverse.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        source: KernelDistribution,
        target: KernelDistribution,
        eta: &[&str],
        eta_inv: &[&str],
        xi: &str,
        xi_inv: &str,
        epsilon1: &str,
    ) -> Result<Self> {
        let m = AccessibilityMapping {
            name: name.to_string(),
            eta: parse_all(eta)?,
            eta_inv: parse_all(eta_inv)?,
            xi: Expr::parse(xi)?,
            xi_inv: Expr::parse(xi_inv)?,
            origin: Origin::Given(Expr::parse(epsilon1)?),
            args: ("s", "t"),
            verdict: None,
            grid: vec![source.free_values()],
            fixed_variants: Vec::new(),
            source,
            target,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let (ns, nt) = (self.source.free_params().len(), self.target.free_params().len());
        if ns == 0 || nt == 0 {
            return Err(input!("{}: both kernels need free parameters", self.name));
        }
        if self.eta.len() != nt {
            return Err(input!(
                "{}: η has {} component(s), target has {nt} free parameter(s)",
                self.name,
                self.eta.len()
            ));
        }
        if self.eta_inv.len() != ns {
            return Err(input!(
                "{}: η⁻¹ has {} component(s), source has {ns} free parameter(s)",
                self.name,
                self.eta_inv.len()
            ));
        }
        let src = side_names(&self.source, &self.target);
        let tgt = side_names(&self.target, &self.source);
        let mut s_names = fixed_names(&self.source, &self.target);
        let mut t_names = s_names.clone();
        s_names.push("s");
        t_names.push("t");
        for e in &self.eta {
            check_vars(e, &src, "η")?;
        }
        for e in &self.eta_inv {
            check_vars(e, &tgt, "η⁻¹")?;
        }
        check_vars(&self.xi, &s_names, "ξ")?;
        check_vars(&self.xi_inv, &t_names, "ξ⁻¹")?;
        if let Origin::Given(e) = &self.origin {
            check_vars(e, &src, "ε₁")?;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Kernel template X|α;α* (free values are placeholders).
    pub fn source(&self) -> &KernelDistribution {
        &self.source
    }

    /// Kernel template Y|β;β*.
    pub fn target(&self) -> &KernelDistribution {
        &self.target
    }

    /// Identifiability verdict transported by the mapping, if catalogued.
    pub fn verdict(&self) -> Option<&Verdict> {
        self.verdict.as_ref()
    }

    pub fn eta_sources(&self) -> Vec<&str> {
        self.eta.iter().map(Expr::source).collect()
    }

    pub fn eta_inv_sources(&self) -> Vec<&str> {
        self.eta_inv.iter().map(Expr::source).collect()
    }

    pub fn xi_source(&self) -> &str {
        self.xi.source()
    }

    pub fn xi_inv_source(&self) -> &str {
        self.xi_inv.source()
    }

    /// Default free-parameter grid.
    pub fn default_grid(&self) -> Result<Vec<Vec<f64>>> {
        match &self.origin {
            Origin::Given(_) => Ok(self.grid.clone()),
            Origin::Reversed(orig) => orig.default_grid()?.iter().map(|a| orig.eta(a)).collect(),
        }
    }

    /// Default fixed-parameter variants, as (name, values).
    pub fn fixed_variants(&self) -> &[(String, Vec<f64>)] {
        &self.fixed_variants
    }

    fn eval_side(
        &self,
        exprs: &[Expr],
        own: &KernelDistribution,
        other: &KernelDistribution,
        free: &[f64],
        role: &str,
    ) -> Result<Vec<f64>> {
        let own_free = own.free_params();
        if free.len() != own_free.len() {
            return Err(input!(
                "{role}: expected {} value(s), got {}",
                own_free.len(),
                free.len()
            ));
        }
        let lookup = |name: &str| {
            if let Some(i) = own_free.iter().position(|n| *n == name) {
                return Some(free[i]);
            }
            if own.family().param_names().contains(&name) {
                return own.param(name);
            }
            if other.fixed_params().contains(&name) {
                return other.param(name);
            }
            None
        };
        exprs
            .iter()
            .map(|e| {
                let v = e.eval_with(&lookup)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(domain!(
                        "{}: {role}({}) = {v}",
                        self.name,
                        fmt_point(&own_free, free)
                    ))
                }
            })
            .collect()
    }

    fn eval_arg(&self, e: &Expr, var: &str, x: f64) -> Result<f64> {
        let lookup = |name: &str| {
            if name == var {
                Some(x)
            } else if self.source.fixed_params().contains(&name) {
                self.source.param(name)
            } else if self.target.fixed_params().contains(&name) {
                self.target.param(name)
            } else {
                None
            }
        };
        e.eval_with(&lookup)
    }

    /// β = η(α).
    pub fn eta(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.eval_side(&self.eta, &self.source, &self.target, alpha, "η")
    }

    /// α = η⁻¹(β).
    pub fn eta_inv(&self, beta: &[f64]) -> Result<Vec<f64>> {
        self.eval_side(&self.eta_inv, &self.target, &self.source, beta, "η⁻¹")
    }

    /// t = ξ(s); NaN where ξ is undefined.
    pub fn xi(&self, s: f64) -> Result<f64> {
        self.eval_arg(&self.xi, self.args.0, s)
    }

    /// s = ξ⁻¹(t).
    pub fn xi_inv(&self, t: f64) -> Result<f64> {
        self.eval_arg(&self.xi_inv, self.args.1, t)
    }

    /// Upper end of the admissible source argument range at α.
    pub fn epsilon1(&self, alpha: &[f64]) -> Result<f64> {
        match &self.origin {
            Origin::Given(e) => {
                let v = self.eval_side(std::slice::from_ref(e), &self.source, &self.target, alpha, "ε₁")?[0];
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err(domain!("{}: ε₁ = {v} is not positive", self.name))
                }
            }
            Origin::Reversed(orig) => orig.epsilon2(&orig.eta_inv(alpha)?),
        }
    }

    /// ε₂ = ξ(ε₁), the target argument range at α.
    pub fn epsilon2(&self, alpha: &[f64]) -> Result<f64> {
        self.xi(self.epsilon1(alpha)?)
    }

    /// Rebinds a fixed parameter in every kernel where it is fixed.
    pub fn with_fixed(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let mut hit = false;
        if self.source.fixed_params().contains(&name) {
            out.source = self.source.with_param(name, value)?;
            hit = true;
        }
        if self.target.fixed_params().contains(&name) {
            out.target = self.target.with_param(name, value)?;
            hit = true;
        }
        if !hit {
            return Err(input!("{}: no fixed parameter `{name}`", self.name));
        }
        if let Origin::Reversed(orig) = &self.origin {
            out.origin = Origin::Reversed(Box::new(orig.with_fixed(name, value)?));
        }
        Ok(out)
    }

    /// The same mapping with source and target exchanged.
    pub fn swapped(&self) -> Self {
        let name = match &self.origin {
            Origin::Reversed(orig) => return (**orig).clone(),
            Origin::Given(_) => format!("{} (reversed)", self.name),
        };
        AccessibilityMapping {
            name,
            source: self.target.clone(),
            target: self.source.clone(),
            eta: self.eta_inv.clone(),
            eta_inv: self.eta.clone(),
            xi: self.xi_inv.clone(),
            xi_inv: self.xi.clone(),
            origin: Origin::Reversed(Box::new(self.clone())),
            args: (self.args.1, self.args.0),
            verdict: self.verdict.clone(),
            grid: Vec::new(),
            fixed_variants: self.fixed_variants.clone(),
        }
    }

    fn source_at(&self, alpha: &[f64]) -> Result<KernelDistribution> {
        self.source.with_free(alpha)
    }

    fn target_at(&self, beta: &[f64]) -> Result<KernelDistribution> {
        self.target.with_free(beta)
    }

    fn alpha_label(&self, alpha: &[f64]) -> String {
        fmt_point(&self.source.free_params(), alpha)
    }

    /// |M_Y(ξ(s); η(α)) − M_X(s; α)| with the Laplace-transform fallback.
    fn identity_residual(&self, alpha: &[f64], s: f64, notes: &mut Vec<String>) -> Result<f64> {
        let x = self.source_at(alpha)?;
        let y = self.target_at(&self.eta(alpha)?)?;
        let at = || format!("{}, s={s}", self.alpha_label(alpha));
        match x.mgf(s) {
            Ok(mx) => {
                let t = self.xi(s)?;
                let my = y.mgf(t).map_err(|e| match e {
                    Error::Divergence { strip, .. } => domain!(
                        "{}: t=ξ(s)={t} leaves the target MGF strip {strip} at {}",
                        self.name,
                        at()
                    ),
                    other => other,
                })?;
                Ok((my - mx).abs())
            }
            Err(Error::Divergence { strip, .. }) => {
                let fallback = if x.family().has_laplace_transform() {
                    let lx = x.laplace_transform(s)?;
                    let t = self.xi(-s)?;
                    if t.is_finite() {
                        y.mgf(t).ok().map(|my| (my - lx).abs())
                    } else {
                        None
                    }
                } else {
                    None
                };
                match fallback {
                    Some(r) => {
                        notes.push(format!("Laplace-transform fallback (s ↦ −s) at {}", at()));
                        Ok(r)
                    }
                    None => Err(domain!(
                        "{}: grid point {} lies outside the source MGF strip {strip}",
                        self.name,
                        at()
                    )),
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Parses a `key = value` mapping file. Keys: `name`, `source`, `target`,
    /// `eta`, `eta_inv` (components separated by `;`), `xi`, `xi_inv`,
    /// `epsilon1`, and optionally `verdict` and `grid` (points separated by
    /// `;`, components by `,`). `#` starts a comment.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| input!("line {}: expected key = value, got `{line}`", i + 1))?;
            let k = k.trim();
            const KEYS: [&str; 10] = [
                "name", "source", "target", "eta", "eta_inv", "xi", "xi_inv", "epsilon1", "verdict", "grid",
            ];
            if !KEYS.contains(&k) {
                return Err(input!("line {}: unknown key `{k}`", i + 1));
            }
            kv.insert(k.to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).map(String::as_str).ok_or_else(|| input!("missing key `{k}`"));
        let source: KernelDistribution = get("source")?.parse()?;
        let target: KernelDistribution = get("target")?.parse()?;
        let mut m = Self::new(
            get("name")?,
            source,
            target,
            &split(get("eta")?),
            &split(get("eta_inv")?),
            get("xi")?,
            get("xi_inv")?,
            get("epsilon1")?,
        )?;
        if let Some(v) = kv.get("verdict") {
            m.verdict = match v.as_str() {
                "identifiable" => Some(Verdict::Identifiable),
                "unidentifiable" => Some(Verdict::Unidentifiable),
                "unknown" => None,
                other => return Err(input!("verdict: `{other}` is not identifiable|unidentifiable|unknown")),
            };
        }
        if let Some(g) = kv.get("grid") {
            m.grid = split(g)
                .into_iter()
                .map(|p| {
                    p.split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|_| input!("grid: `{x}` is not a number")))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input!("cannot read `{}`: {e}", path.display()))?;
        Self::from_config(&text)
    }
}

impl fmt::Display for AccessibilityMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} -> {}", self.name, self.source, self.target)?;
        writeln!(f, "  eta:     {}", self.eta_sources().join("; "))?;
        writeln!(f, "  eta_inv: {}", self.eta_inv_sources().join("; "))?;
        writeln!(f, "  xi:      {}", self.xi.source())?;
        write!(f, "  xi_inv:  {}", self.xi_inv.source())?;
        if let Origin::Given(e) = &self.origin {
            write!(f, "\n  epsilon1: {e}")?;
        }
        if let Some(v) = &self.verdict {
            write!(f, "\n  verdict: {v}")?;
        }
        Ok(())
    }
}

fn split(s: &str) -> Vec<&str> {
    s.split(';').map(str::trim).collect()
}

struct Builtin {
    name: &'static str,
    source: &'static str,
    target: &'static str,
    eta: &'static [&'static str],
    eta_inv: &'static [&'static str],
    xi: &'static str,
    xi_inv: &'static str,
    epsilon1: &'static str,
    verdict: Verdict,
    grid: &'static [&'static [f64]],
    fixed: Option<(&'static str, &'static [f64])>,
}

const GRID_5: &[&[f64]] = &[&[0.25], &[0.5], &[1.0], &[2.0], &[4.0]];

const BUILTINS: [Builtin; 5] = [
    Builtin {
        name: "poisson-to-normal-mv",
        source: "poisson:lambda=1",
        target: "normal-mv:m=1,kappa=1",
        eta: &["lambda"],
        eta_inv: &["m"],
        // root of t + κt²/2 = e^s − 1
        xi: "2*expm1(s) / (1 + sqrt(1 + 2*kappa*expm1(s)))",
        xi_inv: "ln1p(t + 0.5*kappa*t^2)",
        epsilon1: "1",
        verdict: Verdict::Identifiable,
        grid: GRID_5,
        fixed: Some(("kappa", &[0.5, 1.0, 2.0])),
    },
    Builtin {
        name: "gamma-to-negbin",
        source: "gamma:r=2,theta=1",
        target: "negbin:r=2,p=0.5",
        eta: &["theta / (1 + theta)"],
        eta_inv: &["p / (1 - p)"],
        xi: "ln1p(s)",
        xi_inv: "expm1(t)",
        epsilon1: "0.9 * min(1/theta, 1)",
        verdict: Verdict::Identifiable,
        grid: GRID_5,
        fixed: Some(("r", &[1.0, 2.0, 5.0])),
    },
    Builtin {
        name: "exp-to-laplace",
        source: "exponential:theta=1",
        target: "laplace:m=0,sigma=1,free=sigma",
        eta: &["sqrt(theta)"],
        eta_inv: &["sigma^2"],
        xi: "sqrt(s)",
        xi_inv: "t^2",
        epsilon1: "0.9 / theta",
        verdict: Verdict::Identifiable,
        grid: GRID_5,
        fixed: None,
    },
    Builtin {
        name: "laplace-to-discrete-laplace",
        source: "laplace:m=0,sigma=1,free=sigma",
        target: "discrete-laplace:p=0.5",
        // 1 + (1 − √(2ς²+1))/ς², rationalized
        eta: &["2*sigma^2 / (sqrt(1 + 2*sigma^2) + 1)^2"],
        eta_inv: &["sqrt(2*p) / (1 - p)"],
        // acosh(s² + 1)
        xi: "2*asinh(s / sqrt(2))",
        xi_inv: "sqrt(2)*sinh(t/2)",
        epsilon1: "0.9 / sigma",
        verdict: Verdict::Identifiable,
        grid: GRID_5,
        fixed: None,
    },
    Builtin {
        name: "uniform-to-defun",
        source: "uniform:a=1,b=4",
        target: "defun:a=1,b=4",
        eta: &["a", "b"],
        eta_inv: &["a", "b"],
        xi: "sqrt(s)",
        xi_inv: "t^2",
        epsilon1: "1",
        verdict: Verdict::Unidentifiable,
        grid: &[&[0.5, 1.0], &[1.0, 4.0], &[2.0, 3.0]],
        fixed: None,
    },
];

/// The five catalogued mappings.
pub fn builtin_mappings() -> Vec<AccessibilityMapping> {
    BUILTINS
        .iter()
        .map(|b| {
            let mut m = AccessibilityMapping::new(
                b.name,
                b.source.parse().expect("builtin source"),
                b.target.parse().expect("builtin target"),
                b.eta,
                b.eta_inv,
                b.xi,
                b.xi_inv,
                b.epsilon1,
            )
            .expect("builtin mapping");
            m.verdict = Some(b.verdict.clone());
            m.grid = b.grid.iter().map(|p| p.to_vec()).collect();
            m.fixed_variants = b
                .fixed
                .iter()
                .map(|(n, v)| (n.to_string(), v.to_vec()))
                .collect();
            m
        })
        .collect()
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.name).collect()
}

/// A built-in mapping by name.
pub fn lookup(name: &str) -> Result<AccessibilityMapping> {
    builtin_mappings()
        .into_iter()
        .find(|m| m.name == name)
        .ok_or_else(|| input!("unknown mapping `{name}`; known: {}", builtin_names().join(", ")))
}

/// Checks conditions (i)–(iii) of accessibility on `param_grid` × `s_grid`.
pub fn verify_definition1(
    mapping: &AccessibilityMapping,
    param_grid: &[Vec<f64>],
    s_grid: &SGrid,
    tol: f64,
) -> Result<VerificationReport> {
    if param_grid.is_empty() {
        return Err(input!("parameter grid is empty"));
    }
    if !(tol > 0.0) {
        return Err(input!("tolerance must be > 0, got {tol}"));
    }
    s_grid.validate()?;
    let m = mapping;
    let mut inj = Check::new("(i) eta one-to-one", ROUND_TRIP_TOL);
    let mut xic = Check::new("(ii) xi(0)=0, increasing, invertible", ROUND_TRIP_TOL);
    let mut ident = Check::new("(iii) MGF identity", tol);
    let mut notes = vec![GRID_NOTE.to_string()];

    let betas = param_grid.iter().map(|a| m.eta(a)).collect::<Result<Vec<_>>>()?;
    for (a, b) in param_grid.iter().zip(&betas) {
        let back = m.eta_inv(b)?;
        let fwd = m.eta(&back)?;
        let r = a
            .iter()
            .zip(&back)
            .map(|(x, y)| rel_diff(*y, *x))
            .chain(b.iter().zip(&fwd).map(|(x, y)| rel_diff(*y, *x)))
            .fold(0.0, f64::max);
        inj.record(r, || m.alpha_label(a));
    }
    if param_grid[0].len() == 1 {
        let mut pairs: Vec<(f64, f64)> = param_grid.iter().zip(&betas).map(|(a, b)| (a[0], b[0])).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        pairs.dedup_by(|x, y| x.0 == y.0);
        let up = pairs.windows(2).all(|w| w[1].1 > w[0].1);
        let down = pairs.windows(2).all(|w| w[1].1 < w[0].1);
        if !(up || down) {
            inj.fail(|| "η is not strictly monotone on the grid".into());
        }
    } else {
        for i in 0..param_grid.len() {
            for j in 0..i {
                if param_grid[i] != param_grid[j] && betas[i] == betas[j] {
                    inj.fail(|| format!("η collides at {} and {}", m.alpha_label(&param_grid[i]), m.alpha_label(&param_grid[j])));
                }
            }
        }
    }

    xic.record(m.xi(0.0)?.abs(), || "s=0".into());
    for a in param_grid {
        let label = m.alpha_label(a);
        let eps = m.epsilon1(a)?;
        let mut ss = s_grid.values(eps, &label)?;
        ss.sort_by(f64::total_cmp);
        ss.dedup();
        let mut prev_t = f64::NEG_INFINITY;
        for &s in &ss {
            let t = m.xi(s)?;
            if !(t > prev_t) {
                xic.fail(|| format!("ξ not increasing at s={s}"));
            }
            prev_t = t;
            xic.record(rel_diff(m.xi_inv(t)?, s), || format!("s={s}"));
            let r = m.identity_residual(a, s, &mut notes)?;
            ident.record(r, || format!("{label}, s={s}"));
        }
    }
    let grid = format!(
        "{}: {} parameter point(s) × {}",
        m.name,
        param_grid.len(),
        describe_s_grid(s_grid)
    );
    Ok(VerificationReport::new(vec![inj, xic, ident], grid, notes))
}

fn describe_s_grid(g: &SGrid) -> String {
    match g {
        SGrid::Points(p) => format!("{} s point(s)", p.len()),
        SGrid::Scaled { points, fraction } => format!("{points} s point(s) on [0, {fraction}·ε₁]"),
    }
}

/// [`verify_definition1`] over the mapping's default grid and every fixed
/// variant, with the standard s grid.
pub fn verify_default(mapping: &AccessibilityMapping, tol: f64) -> Result<VerificationReport> {
    let mut variants = vec![mapping.clone()];
    for (name, values) in mapping.fixed_variants() {
        variants = variants
            .iter()
            .flat_map(|m| values.iter().map(move |&v| m.with_fixed(name, v)))
            .collect::<Result<_>>()?;
    }
    let mut reports = Vec::new();
    for m in &variants {
        reports.push(verify_definition1(m, &m.default_grid()?, &SGrid::standard(), tol)?);
    }
    Ok(VerificationReport::merge(reports))
}

/// Checks that log M_Y(t; β) = η⁻¹(β)·ξ⁻¹(t), directly and through the
/// t-constancy of log M(t; β_k)/log M(t; β₁). Requires t > 0.
pub fn verify_corollary1<F, G>(
    target: &KernelDistribution,
    eta_inv: F,
    xi_inv: G,
    beta_grid: &[f64],
    t_grid: &[f64],
    tol: f64,
) -> Result<VerificationReport>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let free = target.free_params();
    let grid = format!("{} β point(s) × {} t point(s)", beta_grid.len(), t_grid.len());
    if free.len() != 1 {
        let mut c = Check::new("scalar factorization", tol);
        c.fail(|| format!("{} free parameters", free.len()));
        return Ok(VerificationReport::new(
            vec![c],
            grid,
            vec![format!(
                "no scalar factorization: {} has free parameters {}",
                target.family(),
                free.join(", ")
            )],
        ));
    }
    if beta_grid.is_empty() || t_grid.is_empty() {
        return Err(input!("grids must be non-empty"));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(input!("t grid must be positive, got {t}"));
    }
    let name = free[0];
    let mut factor = Check::new("log M = eta_inv(beta)*xi_inv(t)", tol);
    let mut ratio = Check::new("log-MGF ratio constant in t", tol);
    let mut logs = Vec::with_capacity(beta_grid.len());
    for &b in beta_grid {
        let y = target.with_free(&[b])?;
        let mut row = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let lm = y
                .mgf(t)
                .map_err(|e| match e {
                    Error::Divergence { strip, .. } => {
                        domain!("{name}={b}, t={t} is outside the MGF strip {strip}")
                    }
                    other => other,
                })?
                .ln();
            if !(lm > 0.0) {
                return Err(domain!("log MGF is {lm} at {name}={b}, t={t}"));
            }
            factor.record((lm - eta_inv(b) * xi_inv(t)).abs(), || format!("{name}={b}, t={t}"));
            row.push(lm);
        }
        logs.push(row);
    }
    let e1 = eta_inv(beta_grid[0]);
    for (k, &b) in beta_grid.iter().enumerate().skip(1) {
        let want = eta_inv(b) / e1;
        for (j, &t) in t_grid.iter().enumerate() {
            ratio.record((logs[k][j] / logs[0][j] - want).abs(), || format!("{name}={b}, t={t}"));
        }
    }
    Ok(VerificationReport::new(vec![factor, ratio], grid, Vec::new()))
}

/// Product form M_X(s; θ) = M_X(θs; 1) for a scale-parameter source, and
/// M_Y(ξ(s); η(θ)) = ψ(η⁻¹(β)·ξ⁻¹(t)) with ψ(u) = M_X(u; 1).
pub fn verify_corollary2(
    mapping: &AccessibilityMapping,
    theta_grid: &[f64],
    s_grid: &SGrid,
    tol: f64,
) -> Result<VerificationReport> {
    let src = mapping.source();
    if src.free_params().len() != 1 || !src.family_tags().tags.contains(&Tag::ScaleParameter) {
        return Err(input!(
            "{}: source {} is not a scale-parameter family with free θ",
            mapping.name(),
            src.family()
        ));
    }
    if theta_grid.is_empty() {
        return Err(input!("parameter grid is empty"));
    }
    s_grid.validate()?;
    let unit = src.with_free(&[1.0])?;
    let psi = |u: f64| -> Result<f64> {
        unit.mgf(u)
            .map_err(|e| domain!("ψ({u}) is outside the source MGF strip: {e}"))
    };
    let mut product = Check::new("M_X(s;theta) = M_X(theta*s;1)", tol);
    let mut compose = Check::new("M_Y(t;beta) = psi(eta_inv(beta)*xi_inv(t))", tol);
    for &th in theta_grid {
        let label = mapping.alpha_label(&[th]);
        let x = src.with_free(&[th])?;
        let beta = mapping.eta(&[th])?;
        let y = mapping.target_at(&beta)?;
        let back = mapping.eta_inv(&beta)?[0];
        for s in s_grid.values(mapping.epsilon1(&[th])?, &label)? {
            let at = || format!("{label}, s={s}");
            let mx = x.mgf(s).map_err(|e| domain!("{}: {e}", at()))?;
            product.record((mx - psi(th * s)?).abs(), at);
            let t = mapping.xi(s)?;
            let my = y.mgf(t).map_err(|e| domain!("{}: {e}", at()))?;
            compose.record((my - psi(back * mapping.xi_inv(t)?)?).abs(), at);
        }
    }
    let grid = format!(
        "{}: {} θ point(s) × {}",
        mapping.name(),
        theta_grid.len(),
        describe_s_grid(s_grid)
    );
    Ok(VerificationReport::new(vec![product, compose], grid, Vec::new()))
}

/// Smallest ε₁ over the mixing domain, sampled at 129 points.
fn min_epsilon(m: &AccessibilityMapping, g: &MixingDensity) -> Result<f64> {
    let (lo, hi) = g.domain();
    let n = 128;
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let mut a = lo + (hi - lo) * k as f64 / n as f64;
        // nudge endpoints off an open parameter boundary
        if k == 0 {
            a += 1e-9 * (hi - lo);
        } else if k == n {
            a -= 1e-9 * (hi - lo);
        }
        best = best.min(m.epsilon1(&[a])?);
    }
    Ok(best)
}

/// Mixed-MGF transport: ∫M_Y(η(α); ξ(s)) g(α) dα and ∫M_Y(β; ξ(s)) g_β(β) dβ,
/// with g_β the pushforward of g through η, against ∫M_X(α; s) g(α) dα.
pub fn transport_mixed_mgf(
    mapping: &AccessibilityMapping,
    g: &MixingDensity,
    s_grid: &SGrid,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    if mapping.source().free_params().len() != 1 {
        return Err(input!("{}: transport needs a scalar free parameter", mapping.name()));
    }
    if (g.mass() - 1.0).abs() > NORMALIZATION_TOL {
        return Err(input!("mixing density integrates to {}, not 1", g.mass()));
    }
    if !(tol > 0.0) {
        return Err(input!("tolerance must be > 0, got {tol}"));
    }
    s_grid.validate()?;
    let m = mapping.clone();
    let source_mm = MixtureModel::new(m.source.clone(), g.clone())?;
    let eps = min_epsilon(&m, g)?;
    let (lo, hi) = g.domain();
    let s_values = s_grid.values(eps, &format!("{} on [{lo}, {hi}]", g.description()))?;

    let (fwd, inv) = (m.clone(), m.clone());
    let push = g.pushforward(
        move |a| fwd.eta(&[a]).map(|b| b[0]).unwrap_or(f64::NAN),
        move |b| inv.eta_inv(&[b]).map(|a| a[0]).unwrap_or(f64::NAN),
        format!("pushforward of {} under η", g.description()),
    )?;
    let target_mm = MixtureModel::new(m.target.clone(), push.clone())?;

    let mut norm = Check::new("pushforward normalization", NORMALIZATION_TOL);
    norm.record((push.mass() - 1.0).abs(), || push.description().to_string());
    let mut notes = Vec::new();
    let eta1 = |a: f64| m.eta(&[a]).map(|b| b[0]);
    for k in 1..16 {
        let a = lo + (hi - lo) * k as f64 / 16.0;
        let h = 1e-6 * a.abs().max(1.0);
        let j1 = (eta1(a + h)? - eta1(a - h)?) / (2.0 * h);
        let j2 = (eta1(a + 0.5 * h)? - eta1(a - 0.5 * h)?) / h;
        if !((j1 - j2).abs() <= JACOBIAN_WARN * j2.abs()) {
            notes.push(format!(
                "warning: Jacobian of η unstable under step halving at {}",
                m.alpha_label(&[a])
            ));
        }
    }

    let mut direct = Check::new("mixed MGF via eta (direct)", tol);
    let mut pushed = Check::new("mixed MGF via pushforward density", tol);
    for &s in &s_values {
        let mx = mixture_mgf(&source_mm, s, cfg)?;
        let t = m.xi(s)?;
        let d = g.integrate_against(
            |a| {
                let y = m.target_at(&m.eta(&[a])?)?;
                y.mgf(t).map_err(|e| domain!("t={t} at {}: {e}", m.alpha_label(&[a])))
            },
            cfg,
        )?;
        direct.record((d - mx).abs(), || format!("s={s}"));
        let p = mixture_mgf(&target_mm, t, cfg)?;
        pushed.record((p - mx).abs(), || format!("s={s}"));
    }
    let grid = format!(
        "{}: mixing {} × {} (ε₁ = {eps})",
        m.name(),
        g.description(),
        describe_s_grid(s_grid)
    );
    Ok(VerificationReport::new(vec![direct, pushed, norm], grid, notes))
}
