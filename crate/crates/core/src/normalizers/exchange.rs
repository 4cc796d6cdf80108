use std::collections::BTreeMap;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{Corpus, Paper};
use crate::error::{Error, Result};
use crate::normalizers::{AffineMap, Method, MethodDescriptor, Provenance, ScoreSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeRateMode {
    /// One rate per quantile interval.
    Original,
    /// One rate per field: the mean of the interval rates over a band.
    Redefined,
}

impl FromStr for ExchangeRateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(ExchangeRateMode::Original),
            "redefined" => Ok(ExchangeRateMode::Redefined),
            other => Err(Error::InvalidParameter(format!("unknown exchange-rate mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeRateParams {
    pub mode: ExchangeRateMode,
    pub n_intervals: usize,
    /// Lower bound of the averaging band (1-based, inclusive).
    pub pi_m: usize,
    /// Upper bound of the averaging band (1-based, inclusive).
    pub pi_max: usize,
}

impl ExchangeRateParams {
    pub fn new(mode: ExchangeRateMode) -> Self {
        ExchangeRateParams { mode, n_intervals: 1000, pi_m: 706, pi_max: 998 }
    }

    fn band_is_valid(&self) -> bool {
        1 <= self.pi_m && self.pi_m <= self.pi_max && self.pi_max <= self.n_intervals
    }
}

/// Interval rates per field (reference cell). Vectors are indexed by
/// `interval - 1`; `None` marks an interval with no rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeRateTable {
    pub n_intervals: usize,
    pub pi_m: usize,
    pub pi_max: usize,
    /// Pooled mean citation count per interval.
    pub pooled_means: Vec<Option<f64>>,
    pub e_orig: BTreeMap<String, Vec<Option<f64>>>,
    pub e_redef: BTreeMap<String, Option<f64>>,
    /// Intervals that hold papers of the field but whose pooled mean is zero.
    pub undefined: BTreeMap<String, Vec<usize>>,
}

impl ExchangeRateTable {
    pub fn original(&self, cell: &str, interval: usize) -> Option<f64> {
        self.e_orig.get(cell)?.get(interval.checked_sub(1)?).copied().flatten()
    }
}

/// Assigns 1-based quantile intervals `ceil(r·n/N)` to papers ranked by
/// citations ascending, ties broken by paper id.
fn assign_intervals<'a>(papers: &[&'a Paper], n_intervals: usize) -> Vec<(&'a Paper, usize)> {
    let mut ranked: Vec<&Paper> = papers.to_vec();
    ranked.sort_by(|a, b| a.citations.cmp(&b.citations).then_with(|| a.paper_id.cmp(&b.paper_id)));
    let total = ranked.len();
    ranked.into_iter().enumerate().map(|(i, p)| (p, ((i + 1) * n_intervals).div_ceil(total))).collect()
}

fn interval_means(assigned: &[(&Paper, usize)], n_intervals: usize) -> Vec<Option<f64>> {
    let mut sums = vec![0u128; n_intervals];
    let mut counts = vec![0usize; n_intervals];
    for (p, pi) in assigned {
        sums[pi - 1] += u128::from(p.citations);
        counts[pi - 1] += 1;
    }
    sums.into_iter().zip(counts).map(|(s, c)| (c > 0).then(|| s as f64 / c as f64)).collect()
}

pub fn exchange_rate(corpus: &Corpus, params: &ExchangeRateParams) -> Result<(ExchangeRateTable, ScoreSet)> {
    let n = params.n_intervals;
    if n == 0 {
        return Err(Error::InvalidParameter("n_intervals must be at least 1".into()));
    }
    if params.mode == ExchangeRateMode::Redefined && !params.band_is_valid() {
        return Err(Error::InvalidParameter(format!(
            "special interval [{}, {}] must satisfy 1 <= pi_m <= pi_M <= {n}",
            params.pi_m, params.pi_max
        )));
    }

    let all: Vec<&Paper> = corpus.papers().iter().collect();
    let pooled_means = interval_means(&assign_intervals(&all, n), n);

    let mut table = ExchangeRateTable {
        n_intervals: n,
        pi_m: params.pi_m,
        pi_max: params.pi_max,
        pooled_means: pooled_means.clone(),
        e_orig: BTreeMap::new(),
        e_redef: BTreeMap::new(),
        undefined: BTreeMap::new(),
    };
    let mut assignments = Vec::new();

    for (cell, papers) in corpus.cells() {
        let key = cell.to_string();
        let assigned = assign_intervals(&papers, n);
        let field_means = interval_means(&assigned, n);
        let mut undefined = Vec::new();
        let rates: Vec<Option<f64>> = field_means
            .iter()
            .zip(&pooled_means)
            .enumerate()
            .map(|(i, (field, pooled))| match (field, pooled) {
                (Some(f), Some(p)) if *p > 0.0 => Some(f / p),
                (Some(_), _) => {
                    undefined.push(i + 1);
                    None
                }
                (None, _) => None,
            })
            .collect();

        let redef = if params.band_is_valid() {
            let band: Vec<f64> = rates[params.pi_m - 1..params.pi_max].iter().flatten().copied().collect();
            (!band.is_empty()).then(|| band.iter().sum::<f64>() / band.len() as f64)
        } else {
            None
        };

        table.e_redef.insert(key.clone(), redef);
        table.e_orig.insert(key.clone(), rates);
        if !undefined.is_empty() {
            table.undefined.insert(key.clone(), undefined);
        }
        assignments.push((key, assigned.into_iter().map(|(p, pi)| (p.clone(), pi)).collect::<Vec<_>>()));
    }

    let mut scores = BTreeMap::new();
    let mut maps = BTreeMap::new();
    let method = match params.mode {
        ExchangeRateMode::Original => {
            for (key, assigned) in &assignments {
                for (paper, pi) in assigned {
                    let rate = table.original(key, *pi).ok_or_else(|| Error::UndefinedExchangeRate {
                        paper_id: paper.paper_id.clone(),
                        interval: *pi,
                    })?;
                    // A zero rate means every paper in the interval has zero citations.
                    let score = if rate == 0.0 { 0.0 } else { paper.citations as f64 / rate };
                    scores.insert(paper.paper_id.clone(), score);
                }
            }
            Method::ExchangeRateOriginal
        }
        ExchangeRateMode::Redefined => {
            for (key, assigned) in &assignments {
                let rate = table.e_redef[key].filter(|&e| e > 0.0).ok_or_else(|| Error::NoDefinedRate {
                    cell: key.clone(),
                    pi_m: params.pi_m,
                    pi_max: params.pi_max,
                })?;
                for (paper, _) in assigned {
                    scores.insert(paper.paper_id.clone(), paper.citations as f64 / rate);
                }
                maps.insert(key.clone(), AffineMap::new(1.0 / rate, 0.0)?);
            }
            Method::ExchangeRateRedefined
        }
    };

    let descriptor = MethodDescriptor::new(method)
        .with_param("n_intervals", n)
        .with_param("pi_m", params.pi_m)
        .with_param("pi_M", params.pi_max);
    let set = ScoreSet {
        method: descriptor,
        scores,
        maps,
        provenance: Provenance { source: corpus.fingerprint(), n_papers: corpus.len() },
    };
    Ok((table, set))
}
