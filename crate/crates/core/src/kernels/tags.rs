//! Family-membership metadata and catalogued identifiability verdicts.

use std::collections::BTreeSet;
use std::fmt;

use super::{Family, KernelDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// CF is an r-th power of a fixed function of ω (free r).
    AdditivelyClosed,
    /// F(x; θ) = F(x/θ; 1) (free θ).
    ScaleParameter,
    /// F(x; m) = F(x − m; 0) (free m).
    LocationParameter,
    /// PMF of the form c_x q^x / C(q) (free q).
    InfinitePowerSeries,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Identifiable,
    Unidentifiable,
    /// Holds only under a stated condition.
    Conditional(&'static str),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Identifiable => f.write_str("identifiable"),
            Verdict::Unidentifiable => f.write_str("unidentifiable"),
            Verdict::Conditional(c) => write!(f, "conditional: {c}"),
        }
    }
}

/// A known verdict for continuous mixtures over a given free-parameter set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownVerdict {
    pub free: Vec<&'static str>,
    pub verdict: Verdict,
    pub citation: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTag {
    pub tags: BTreeSet<Tag>,
    /// Catalogued verdicts matching the kernel's free-parameter set.
    pub identifiable_free_params: Vec<KnownVerdict>,
}

impl FamilyTag {
    /// The verdict for the kernel's own free set, if the catalog has one.
    pub fn verdict(&self) -> Option<&Verdict> {
        self.identifiable_free_params.first().map(|v| &v.verdict)
    }
}

const FELLER_1943: &str = "Feller (1943)";
const TEICHER_1961: &str = "Teicher (1961)";

fn kv(free: &[&'static str], verdict: Verdict, citation: &'static str) -> KnownVerdict {
    KnownVerdict {
        free: free.to_vec(),
        verdict,
        citation,
    }
}

/// Every catalogued (free set → verdict) entry for a family.
pub fn catalog(family: Family) -> Vec<KnownVerdict> {
    use Verdict::*;
    match family {
        Family::Poisson => vec![kv(&["lambda"], Identifiable, FELLER_1943)],
        Family::NegativeBinomial => vec![
            kv(&["r"], Identifiable, TEICHER_1961),
            kv(
                &["p"],
                Identifiable,
                "GF-accessible from Gamma with free scale (gamma-to-negbin)",
            ),
        ],
        Family::Gamma => vec![
            kv(&["r"], Identifiable, TEICHER_1961),
            kv(&["theta"], Identifiable, TEICHER_1961),
        ],
        Family::Exponential => vec![kv(&["theta"], Identifiable, TEICHER_1961)],
        Family::Weibull => vec![kv(&["theta"], Identifiable, TEICHER_1961)],
        Family::Pareto1 => vec![kv(&["theta"], Identifiable, TEICHER_1961)],
        Family::Normal => vec![kv(&["m"], Identifiable, TEICHER_1961)],
        Family::NormalMeanVariance => vec![kv(
            &["m"],
            Identifiable,
            "GF-accessible from Poisson (poisson-to-normal-mv)",
        )],
        Family::Laplace => vec![
            kv(&["m"], Identifiable, TEICHER_1961),
            kv(
                &["sigma"],
                Identifiable,
                "GF-accessible from Exponential (exp-to-laplace), m = 0",
            ),
        ],
        Family::Gumbel => vec![kv(&["m"], Identifiable, TEICHER_1961)],
        // identifiable only under further conditions; no verdict recorded
        Family::Logarithmic => vec![],
        Family::DiscreteLaplace => vec![kv(
            &["p"],
            Identifiable,
            "GF-accessible from Laplace (laplace-to-discrete-laplace)",
        )],
        Family::Uniform => vec![
            kv(&["a", "b"], Unidentifiable, TEICHER_1961),
            kv(
                &["a"],
                Conditional(
                    "identifiable iff exactly one of m=(a+b)/2, l=b-a is free, but not if both are free",
                ),
                TEICHER_1961,
            ),
            kv(
                &["b"],
                Conditional(
                    "identifiable iff exactly one of m=(a+b)/2, l=b-a is free, but not if both are free",
                ),
                TEICHER_1961,
            ),
        ],
        Family::DifferentiatedErrorFunction => vec![kv(
            &["a", "b"],
            Unidentifiable,
            "GF-accessible from Uniform with free (a, b) (uniform-to-defun)",
        )],
    }
}

fn tags_for(family: Family, free: &[&str]) -> BTreeSet<Tag> {
    use Tag::*;
    let mut tags = BTreeSet::new();
    if free.len() != 1 {
        return tags;
    }
    match (family, free[0]) {
        (Family::Poisson, "lambda") => {
            tags.insert(AdditivelyClosed);
            tags.insert(InfinitePowerSeries);
        }
        (Family::NegativeBinomial, "r") => {
            tags.insert(AdditivelyClosed);
        }
        (Family::NegativeBinomial, "p") => {
            tags.insert(InfinitePowerSeries);
        }
        (Family::Gamma, "r") => {
            tags.insert(AdditivelyClosed);
        }
        (Family::Gamma | Family::Exponential | Family::Weibull | Family::Pareto1, "theta") => {
            tags.insert(ScaleParameter);
        }
        (Family::Normal | Family::Laplace | Family::Gumbel, "m") => {
            tags.insert(LocationParameter);
        }
        (Family::NormalMeanVariance, "m") => {
            tags.insert(AdditivelyClosed);
        }
        (Family::Logarithmic, "q") => {
            tags.insert(InfinitePowerSeries);
        }
        _ => {}
    }
    tags
}

pub(super) fn family_tags(dist: &KernelDistribution) -> FamilyTag {
    let free = dist.free_params();
    let mut sorted_free = free.clone();
    sorted_free.sort_unstable();
    let verdicts = catalog(dist.family())
        .into_iter()
        .filter(|k| {
            let mut f = k.free.clone();
            f.sort_unstable();
            f == sorted_free
        })
        .collect();
    FamilyTag {
        tags: tags_for(dist.family(), &free),
        identifiable_free_params: verdicts,
    }
}
