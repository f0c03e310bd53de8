//! JSON problem files. Command-line flags override fields read from a file.

use logcap::rational::{self, serde_rational_opt};
use logcap::{ExactPoly, IntervalUnion};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<IntervalUnion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_denominator: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_rational_opt")]
    pub m_prime: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ExactPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "serde_rational_opt")]
    pub m: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Problem {
    pub fn from_json(text: &str) -> anyhow::Result<Problem> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merge(self, over: Problem) -> Problem {
        Problem {
            bands: over.bands.or(self.bands),
            method: over.method.or(self.method),
            degree: over.degree.or(self.degree),
            samples: over.samples.or(self.samples),
            measure: over.measure.or(self.measure),
            r: over.r.or(self.r),
            max_denominator: over.max_denominator.or(self.max_denominator),
            m_prime: over.m_prime.or(self.m_prime),
            preset: over.preset.or(self.preset),
            p: over.p.or(self.p),
            m: over.m.or(self.m),
            table: over.table.or(self.table),
            degree_cap: over.degree_cap.or(self.degree_cap),
            q: over.q.or(self.q),
            seed: over.seed.or(self.seed),
            tolerance: over.tolerance.or(self.tolerance),
        }
    }
}

pub fn parse_bands(text: &str) -> anyhow::Result<IntervalUnion> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_poly(text: &str) -> anyhow::Result<ExactPoly> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_rational(text: &str) -> anyhow::Result<BigRational> {
    Ok(rational::parse(text)?)
}

pub fn parse_list(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| anyhow::anyhow!("bad list entry {s:?}: {e}"))
        })
        .collect()
}
