use std::str::FromStr;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalizers::{score_cells, CellScores, Method, MethodDescriptor, ScoreSet};

/// Counting rule for percentile ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PercentileMode {
    /// Share of papers cited at most as often as the focal paper.
    #[default]
    CpIn,
    /// Share of papers cited strictly less often.
    CpEx,
}

impl FromStr for PercentileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp-in" | "cpin" => Ok(PercentileMode::CpIn),
            "cp-ex" | "cpex" => Ok(PercentileMode::CpEx),
            other => Err(Error::InvalidParameter(format!("unknown percentile mode `{other}`"))),
        }
    }
}

/// Percentile rank on a 0-100 scale; full precision is kept.
pub(crate) fn percentile_of(sorted: &[u64], x: u64, mode: PercentileMode) -> f64 {
    let count = match mode {
        PercentileMode::CpIn => sorted.partition_point(|&v| v <= x),
        PercentileMode::CpEx => sorted.partition_point(|&v| v < x),
    };
    100.0 * count as f64 / sorted.len() as f64
}

pub fn percentile_rank(corpus: &Corpus, mode: PercentileMode) -> Result<ScoreSet> {
    let method = match mode {
        PercentileMode::CpIn => Method::PercentileCpIn,
        PercentileMode::CpEx => Method::PercentileCpEx,
    };
    score_cells(corpus, MethodDescriptor::new(method), |_, papers| {
        let mut sorted: Vec<u64> = papers.iter().map(|p| p.citations).collect();
        sorted.sort_unstable();
        Ok(CellScores { scores: papers.iter().map(|p| percentile_of(&sorted, p.citations, mode)).collect(), map: None })
    })
}
