//! Text form of a kernel: `family:name1=value1,name2=value2,free=a,b`.
//!
//! Tokens after `free=` that carry no `=` extend the free list, so both
//! `uniform:a=1,b=4,free=a,b` and `gamma:r=2,theta=1,free=theta` parse.

use std::fmt;
use std::str::FromStr;

use super::{Family, KernelDistribution};
use crate::error::{input, Error, Result};

/// Splits `name:body` into the family token and the raw `k=v` tokens.
pub(crate) fn split_spec(s: &str) -> Result<(&str, Vec<&str>)> {
    let s = s.trim();
    let (head, body) = match s.split_once(':') {
        Some((h, b)) => (h.trim(), b.trim()),
        None => (s, ""),
    };
    if head.is_empty() {
        return Err(input!("missing family name in `{s}`"));
    }
    let toks = if body.is_empty() {
        Vec::new()
    } else {
        body.split(',').map(str::trim).collect()
    };
    Ok((head, toks))
}

pub(crate) fn parse_number(tok: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| input!("`{tok}`: not a number"))
}

impl FromStr for KernelDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, toks) = split_spec(s)?;
        let family = Family::from_name(head).ok_or_else(|| input!("unknown family `{head}`"))?;
        let mut params: Vec<(String, f64)> = Vec::new();
        let mut free: Option<Vec<String>> = None;
        let mut in_free = false;
        for tok in toks {
            if tok.is_empty() {
                continue;
            }
            match tok.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim();
                    if k == "free" {
                        in_free = true;
                        let list = free.get_or_insert_with(Vec::new);
                        list.extend(
                            v.split(['|', ' '])
                                .map(str::trim)
                                .filter(|x| !x.is_empty())
                                .map(String::from),
                        );
                    } else {
                        in_free = false;
                        params.push((k.to_string(), parse_number(tok, v)?));
                    }
                }
                None if in_free => free.get_or_insert_with(Vec::new).push(tok.to_string()),
                None => return Err(input!("`{tok}`: expected name=value")),
            }
        }
        let named: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        match free {
            Some(list) => {
                let refs: Vec<&str> = list.iter().map(String::as_str).collect();
                KernelDistribution::new(family, &named, &refs)
            }
            None => KernelDistribution::with_default_free(family, &named),
        }
    }
}

impl fmt::Display for KernelDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.family)?;
        for (i, (name, v)) in self.params().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{name}={v}")?;
        }
        let free = self.free_params();
        if !free.is_empty() {
            write!(f, ",free={}", free.join(","))?;
        }
        Ok(())
    }
}
