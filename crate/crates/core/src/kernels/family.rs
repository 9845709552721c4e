use std::fmt;

use crate::error::{domain, Result};

/// Kernel families in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Poisson,
    NegativeBinomial,
    Gamma,
    Exponential,
    Weibull,
    Pareto1,
    Normal,
    /// Normal(m, κm): mean m, variance κ·m.
    NormalMeanVariance,
    Laplace,
    Gumbel,
    Logarithmic,
    DiscreteLaplace,
    Uniform,
    DifferentiatedErrorFunction,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::Poisson,
        Family::NegativeBinomial,
        Family::Gamma,
        Family::Exponential,
        Family::Weibull,
        Family::Pareto1,
        Family::Normal,
        Family::NormalMeanVariance,
        Family::Laplace,
        Family::Gumbel,
        Family::Logarithmic,
        Family::DiscreteLaplace,
        Family::Uniform,
        Family::DifferentiatedErrorFunction,
    ];

    /// Canonical name used by the text grammar.
    pub fn name(self) -> &'static str {
        match self {
            Family::Poisson => "poisson",
            Family::NegativeBinomial => "negbin",
            Family::Gamma => "gamma",
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
            Family::Pareto1 => "pareto1",
            Family::Normal => "normal",
            Family::NormalMeanVariance => "normal-mv",
            Family::Laplace => "laplace",
            Family::Gumbel => "gumbel",
            Family::Logarithmic => "logarithmic",
            Family::DiscreteLaplace => "discrete-laplace",
            Family::Uniform => "uniform",
            Family::DifferentiatedErrorFunction => "defun",
        }
    }

    pub fn from_name(s: &str) -> Option<Family> {
        let s = s.trim().to_ascii_lowercase();
        Some(match s.as_str() {
            "poisson" => Family::Poisson,
            "negbin" | "negative-binomial" | "negativebinomial" | "nb" => Family::NegativeBinomial,
            "gamma" => Family::Gamma,
            "exponential" | "exp" => Family::Exponential,
            "weibull" => Family::Weibull,
            "pareto1" | "pareto" => Family::Pareto1,
            "normal" => Family::Normal,
            "normal-mv" | "normal-mean-variance" | "nmv" => Family::NormalMeanVariance,
            "laplace" => Family::Laplace,
            "gumbel" => Family::Gumbel,
            "logarithmic" | "log" => Family::Logarithmic,
            "discrete-laplace" | "dlaplace" | "dl" => Family::DiscreteLaplace,
            "uniform" => Family::Uniform,
            "defun" | "differentiated-error-function" | "de" => Family::DifferentiatedErrorFunction,
            _ => return None,
        })
    }

    /// Parameter names in storage order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Poisson => &["lambda"],
            Family::NegativeBinomial => &["r", "p"],
            Family::Gamma => &["r", "theta"],
            Family::Exponential => &["theta"],
            Family::Weibull => &["theta", "tau"],
            Family::Pareto1 => &["alpha", "theta"],
            Family::Normal => &["m", "var"],
            Family::NormalMeanVariance => &["m", "kappa"],
            Family::Laplace | Family::Gumbel => &["m", "sigma"],
            Family::Logarithmic => &["q"],
            Family::DiscreteLaplace => &["p"],
            Family::Uniform | Family::DifferentiatedErrorFunction => &["a", "b"],
        }
    }

    /// Free parameters assumed when a spec string carries no `free=` list.
    pub fn default_free(self) -> &'static [&'static str] {
        match self {
            Family::Poisson => &["lambda"],
            Family::NegativeBinomial => &["p"],
            Family::Gamma | Family::Exponential | Family::Weibull | Family::Pareto1 => &["theta"],
            Family::Normal
            | Family::NormalMeanVariance
            | Family::Laplace
            | Family::Gumbel => &["m"],
            Family::Logarithmic => &["q"],
            Family::DiscreteLaplace => &["p"],
            Family::Uniform | Family::DifferentiatedErrorFunction => &["a", "b"],
        }
    }

    /// Default value for a parameter that may be omitted (location m = 0).
    pub(crate) fn default_value(self, name: &str) -> Option<f64> {
        match (self, name) {
            (Family::Normal | Family::Laplace | Family::Gumbel, "m") => Some(0.0),
            _ => None,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            Family::Poisson
                | Family::NegativeBinomial
                | Family::Logarithmic
                | Family::DiscreteLaplace
        )
    }

    /// Families supported on the positive half-line, which expose Laplace transforms.
    pub fn has_laplace_transform(self) -> bool {
        matches!(
            self,
            Family::Gamma | Family::Exponential | Family::Weibull | Family::Pareto1
        )
    }

    /// Open domain (lo, hi) of a single parameter; `closed_lo` marks lo as admissible.
    pub fn param_domain(self, name: &str) -> Option<ParamDomain> {
        let positive = ParamDomain::open(0.0, f64::INFINITY);
        let unit = ParamDomain::open(0.0, 1.0);
        let real = ParamDomain::open(f64::NEG_INFINITY, f64::INFINITY);
        Some(match (self, name) {
            (Family::Poisson, "lambda") => positive,
            (Family::NegativeBinomial, "r") => positive,
            (Family::NegativeBinomial, "p") => unit,
            (Family::Gamma, "r" | "theta") => positive,
            (Family::Exponential, "theta") => positive,
            (Family::Weibull, "theta" | "tau") => positive,
            (Family::Pareto1, "alpha" | "theta") => positive,
            (Family::Normal, "m") => real,
            (Family::Normal, "var") => positive,
            (Family::NormalMeanVariance, "m" | "kappa") => positive,
            (Family::Laplace | Family::Gumbel, "m") => real,
            (Family::Laplace | Family::Gumbel, "sigma") => positive,
            (Family::Logarithmic, "q") => unit,
            (Family::DiscreteLaplace, "p") => unit,
            (Family::Uniform | Family::DifferentiatedErrorFunction, "a") => ParamDomain {
                lo: 0.0,
                hi: f64::INFINITY,
                closed_lo: true,
            },
            (Family::Uniform | Family::DifferentiatedErrorFunction, "b") => positive,
            _ => return None,
        })
    }

    pub(crate) fn check(self, values: &[f64]) -> Result<()> {
        for (name, &v) in self.param_names().iter().zip(values) {
            let d = self.param_domain(name).expect("catalogued parameter");
            if !d.contains(v) {
                return Err(domain!(
                    "{}: parameter {name}={v} outside {d}",
                    self.name()
                ));
            }
        }
        if matches!(self, Family::Uniform | Family::DifferentiatedErrorFunction)
            && values[0] >= values[1]
        {
            return Err(domain!(
                "{}: requires a < b, got a={} b={}",
                self.name(),
                values[0],
                values[1]
            ));
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Admissible range of a scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDomain {
    pub lo: f64,
    pub hi: f64,
    pub closed_lo: bool,
}

impl ParamDomain {
    fn open(lo: f64, hi: f64) -> Self {
        ParamDomain {
            lo,
            hi,
            closed_lo: false,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v.is_finite() && (v > self.lo || (self.closed_lo && v == self.lo)) && v < self.hi
    }
}

impl fmt::Display for ParamDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.closed_lo { '[' } else { '(' };
        write!(f, "{l}{}, {})", self.lo, self.hi)
    }
}
