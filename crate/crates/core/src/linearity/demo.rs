use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalizers::{percentile_rank, PercentileMode};

/// One side-by-side comparison, with terms at two decimals as they are
/// displayed; sums are taken over the displayed terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub equation: u8,
    pub lhs_terms: Vec<f64>,
    pub lhs: f64,
    pub rhs_terms: Vec<f64>,
    pub rhs: f64,
    pub relation: String,
}

impl Comparison {
    fn new(equation: u8, lhs_terms: Vec<f64>, rhs_terms: Vec<f64>, claimed_equal: bool) -> Self {
        // work in hundredths so the relation is decided exactly
        let cents = |v: &f64| (v * 100.0).round() as i64;
        let lhs: i64 = lhs_terms.iter().map(cents).sum();
        let rhs: i64 = rhs_terms.iter().map(cents).sum();
        let relation = match lhs.cmp(&rhs) {
            Ordering::Equal => "=",
            _ if claimed_equal => "!=",
            Ordering::Less => "<",
            Ordering::Greater => ">",
        };
        Comparison {
            equation,
            lhs_terms: lhs_terms.iter().map(|v| cents(v) as f64 / 100.0).collect(),
            lhs: lhs as f64 / 100.0,
            rhs_terms: rhs_terms.iter().map(|v| cents(v) as f64 / 100.0).collect(),
            rhs: rhs as f64 / 100.0,
            relation: relation.to_owned(),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |terms: &[f64]| terms.iter().map(|t| format!("{t:.2}")).collect::<Vec<_>>().join(" + ");
        let relation = if self.relation == "!=" { "≠" } else { self.relation.as_str() };
        write!(
            f,
            "({}) {} = {:.2} {} {} = {:.2}",
            self.equation,
            join(&self.lhs_terms),
            self.lhs,
            relation,
            join(&self.rhs_terms),
            self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub comparisons: Vec<Comparison>,
}

impl DemoReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.comparisons)?)
    }
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Raw citation counts are equidistant; CP-IN percentile ranks are not.")?;
        for (title, c) in [
            "raw counts, A + B vs C + D",
            "percentile ranks, A + B vs C + D",
            "raw counts, four papers with 1 citation vs one with 200",
            "percentile ranks, four papers with 1 citation vs one with 200",
        ]
        .iter()
        .zip(&self.comparisons)
        {
            writeln!(f, "{c}    [{title}]")?;
        }
        Ok(())
    }
}

/// Sums raw counts and CP-IN percentile ranks of the same papers of the
/// 52-paper demonstration set, showing that the percentile sums disagree
/// where the raw sums agree (42 + 1 vs 43 + 0) and invert an ordering
/// (four singly cited papers vs one with 200 citations).
pub fn misuse_demo(corpus: &Corpus) -> Result<DemoReport> {
    let pct = percentile_rank(corpus, PercentileMode::CpIn)?;
    let score_at = |citations: u64| -> Result<f64> {
        let paper = corpus
            .papers()
            .iter()
            .find(|p| p.citations == citations)
            .ok_or_else(|| Error::InvalidParameter(format!("no paper with {citations} citations")))?;
        Ok(pct.scores[&paper.paper_id])
    };
    let one = score_at(1)?;
    Ok(DemoReport {
        comparisons: vec![
            Comparison::new(3, vec![42.0, 1.0], vec![43.0, 0.0], true),
            Comparison::new(4, vec![score_at(42)?, one], vec![score_at(43)?, score_at(0)?], true),
            Comparison::new(5, vec![1.0; 4], vec![200.0], false),
            Comparison::new(6, vec![one; 4], vec![score_at(200)?], false),
        ],
    })
}
