use crate::corpus::{Corpus, ReferenceSetStats};
use crate::error::{Error, Result};
use crate::normalizers::{score_cells, AffineMap, CellScores, Method, MethodDescriptor, ScoreSet};

fn counts(papers: &[&crate::corpus::Paper]) -> Vec<u64> {
    papers.iter().map(|p| p.citations).collect()
}

/// Identity scores: the raw citation counts themselves.
pub fn raw_citations(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::Raw), |_, papers| {
        Ok(CellScores {
            scores: papers.iter().map(|p| p.citations as f64).collect(),
            map: Some(AffineMap { k: 1.0, b: 0.0 }),
        })
    })
}

/// `x / m`, with `m` the cell's mean citation count.
pub fn mean_based(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::Mean), |cell, papers| {
        let stats = ReferenceSetStats::from_counts(&counts(papers));
        if stats.m == 0.0 {
            return Err(Error::DivisionUndefined {
                method: "mean",
                cell: cell.to_string(),
                what: "mean citation count",
            });
        }
        Ok(CellScores {
            scores: papers.iter().map(|p| p.citations as f64 / stats.m).collect(),
            map: Some(AffineMap::new(1.0 / stats.m, 0.0)?),
        })
    })
}

/// `x / median`.
pub fn median_based(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::Median), |cell, papers| {
        let stats = ReferenceSetStats::from_counts(&counts(papers));
        if stats.median == 0.0 {
            return Err(Error::DivisionUndefined {
                method: "median",
                cell: cell.to_string(),
                what: "median citation count",
            });
        }
        Ok(CellScores {
            scores: papers.iter().map(|p| p.citations as f64 / stats.median).collect(),
            map: Some(AffineMap::new(1.0 / stats.median, 0.0)?),
        })
    })
}

/// `(x - m) / sd` with the population standard deviation.
pub fn z_score(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::ZScore), |cell, papers| {
        let stats = ReferenceSetStats::from_counts(&counts(papers));
        if stats.sd == 0.0 {
            return Err(Error::ConstantCell { method: "z-score", cell: cell.to_string() });
        }
        Ok(CellScores {
            scores: papers.iter().map(|p| (p.citations as f64 - stats.m) / stats.sd).collect(),
            map: Some(AffineMap::new(1.0 / stats.sd, -stats.m / stats.sd)?),
        })
    })
}

/// `(ln(x+1) - mu_ln) / sigma_ln`: a z score on the log scale.
pub fn citation_zscore(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::CitationZ), |cell, papers| {
        let stats = ReferenceSetStats::from_counts(&counts(papers));
        if stats.sigma_ln == 0.0 {
            return Err(Error::ConstantCell { method: "citation-z", cell: cell.to_string() });
        }
        Ok(CellScores {
            scores: papers.iter().map(|p| ((p.citations as f64).ln_1p() - stats.mu_ln) / stats.sigma_ln).collect(),
            map: None,
        })
    })
}

/// `ln(x+1) / mu_ln`: a mean-based score on the log scale.
pub fn nlcs(corpus: &Corpus) -> Result<ScoreSet> {
    score_cells(corpus, MethodDescriptor::new(Method::Nlcs), |cell, papers| {
        let stats = ReferenceSetStats::from_counts(&counts(papers));
        if stats.mu_ln == 0.0 {
            return Err(Error::DivisionUndefined { method: "nlcs", cell: cell.to_string(), what: "mean of ln(x+1)" });
        }
        Ok(CellScores {
            scores: papers.iter().map(|p| (p.citations as f64).ln_1p() / stats.mu_ln).collect(),
            map: None,
        })
    })
}
