use std::collections::BTreeSet;

use serde::Serialize;

use crate::corpus::{Corpus, ReferenceCell};
use crate::error::{Error, Result};
use crate::normalizers::{score_cells, CellScores, Method, MethodDescriptor, ScoreSet};

/// Distribution that cells are mapped onto.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Reference {
    /// All papers of the corpus pooled together.
    #[default]
    Pooled,
    /// An externally supplied set of citation counts.
    Explicit(Vec<u64>),
}

impl Reference {
    pub(crate) fn resolve(&self, corpus: &Corpus) -> Result<Vec<u64>> {
        let mut values = match self {
            Reference::Pooled => corpus.pooled_citations(),
            Reference::Explicit(values) => values.clone(),
        };
        if values.is_empty() {
            return Err(Error::EmptyReference);
        }
        values.sort_unstable();
        Ok(values)
    }

    fn label(&self) -> &'static str {
        match self {
            Reference::Pooled => "pooled",
            Reference::Explicit(_) => "explicit",
        }
    }
}

/// Generalized inverse of the reference CDF at position `hits / total`:
/// the smallest reference value whose cumulative share reaches it.
/// Comparisons are done on integer cross products, so ties are exact.
fn inverse_cdf(reference: &[u64], hits: usize, total: usize) -> u64 {
    let n_ref = reference.len() as u128;
    let (hits, total) = (hits as u128, total as u128);
    let mut lo = 0usize;
    let mut hi = reference.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        // cumulative count at value reference[mid] includes all its ties
        let cum = reference.partition_point(|&v| v <= reference[mid]) as u128;
        if cum * total >= hits * n_ref {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    reference[lo]
}

/// Maps each paper to the reference value at the same CP-IN position.
pub fn reverse_engineering(corpus: &Corpus, reference: &Reference) -> Result<ScoreSet> {
    let reference_values = reference.resolve(corpus)?;
    let descriptor = MethodDescriptor::new(Method::ReverseEngineering)
        .with_param("reference", reference.label())
        .with_param("reference_size", reference_values.len());
    score_cells(corpus, descriptor, |_, papers| {
        let mut sorted: Vec<u64> = papers.iter().map(|p| p.citations).collect();
        sorted.sort_unstable();
        let scores = papers
            .iter()
            .map(|p| {
                let hits = sorted.partition_point(|&v| v <= p.citations);
                inverse_cdf(&reference_values, hits, sorted.len()) as f64
            })
            .collect();
        Ok(CellScores { scores, map: None })
    })
}

/// Distinct `(y, x)` pairs of a reverse-engineering mapping in one cell,
/// ordered by `x`.
pub fn reverse_engineering_pairs(corpus: &Corpus, scores: &ScoreSet, cell: &ReferenceCell) -> Result<Vec<(f64, f64)>> {
    let mut pairs = BTreeSet::new();
    for paper in corpus.cell_papers(cell)? {
        let y = scores.get(&paper.paper_id).ok_or_else(|| Error::UnknownPaper(paper.paper_id.clone()))?;
        pairs.insert((paper.citations, y.to_bits()));
    }
    Ok(pairs.into_iter().map(|(x, y)| (f64::from_bits(y), x as f64)).collect())
}

/// Result of fitting `x = lambda · y^alpha` in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub lambda: f64,
    pub alpha_exp: f64,
    /// Largest `|fitted - x| / x` over the pairs used.
    pub max_rel_residual: f64,
    pub n_used: usize,
    /// Pairs dropped because a coordinate was not positive.
    pub n_excluded: usize,
}

/// Least-squares fit of `ln x = ln lambda + alpha · ln y` over `(y, x)`
/// pairs with both coordinates positive.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<PowerLawFit> {
    let logs: Vec<(f64, f64)> =
        pairs.iter().filter(|(y, x)| *y > 0.0 && *x > 0.0).map(|(y, x)| (y.ln(), x.ln())).collect();
    let n_used = logs.len();
    if n_used < 2 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs at least 2 pairs with positive coordinates, got {n_used}"
        )));
    }
    let n = n_used as f64;
    let mean_u = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let suu: f64 = logs.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    let suv: f64 = logs.iter().map(|p| (p.0 - mean_u) * (p.1 - mean_v)).sum();
    if suu == 0.0 {
        return Err(Error::InsufficientData("power-law fit needs at least 2 distinct y values".into()));
    }
    let alpha_exp = suv / suu;
    let lambda = (mean_v - alpha_exp * mean_u).exp();
    let max_rel_residual = pairs
        .iter()
        .filter(|(y, x)| *y > 0.0 && *x > 0.0)
        .map(|&(y, x)| ((lambda * y.powf(alpha_exp) - x) / x).abs())
        .fold(0.0, f64::max);
    Ok(PowerLawFit { lambda, alpha_exp, max_rel_residual, n_used, n_excluded: pairs.len() - n_used })
}
