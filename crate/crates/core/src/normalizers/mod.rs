//! Cell-based normalization methods and the score sets they produce.
//!
//! Every method returns a [`ScoreSet`] tagged with the linearity class the
//! method is known to have. Linear methods additionally record the affine
//! map `y = kx + b` applied in each reference cell.

mod cell_based;
mod exchange;
mod optimization;
mod percentile;
mod rcr;
mod reverse;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{read_rows, Corpus, Paper, ReferenceCell};
use crate::error::{Error, Result};

pub use cell_based::{citation_zscore, mean_based, median_based, nlcs, raw_citations, z_score};
pub use exchange::{exchange_rate, ExchangeRateMode, ExchangeRateParams, ExchangeRateTable};
pub use optimization::{default_grid, optimization_linear, quantile, CellFit, OptimizationResult};
pub use percentile::{percentile_rank, PercentileMode};
pub use rcr::{parse_rcr_inputs, rcr, RcrFit, RcrInput};
pub use reverse::{fit_power_law, reverse_engineering, reverse_engineering_pairs, PowerLawFit, Reference};

pub const SCORES_HEADER: [&str; 4] = ["paper_id", "method", "score", "linearity_class"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Linearity {
    Linear,
    Nonlinear,
    OutsideCategory,
}

impl Linearity {
    pub fn as_str(self) -> &'static str {
        match self {
            Linearity::Linear => "linear",
            Linearity::Nonlinear => "nonlinear",
            Linearity::OutsideCategory => "outside_category",
        }
    }
}

impl fmt::Display for Linearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Linearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Linearity::Linear),
            "nonlinear" => Ok(Linearity::Nonlinear),
            "outside_category" => Ok(Linearity::OutsideCategory),
            other => Err(Error::InvalidParameter(format!("unknown linearity class `{other}`"))),
        }
    }
}

/// Identity of a normalization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    /// Unnormalized citation counts (identity map).
    Raw,
    Mean,
    Median,
    ZScore,
    OptimizationLinear,
    Rcr,
    ExchangeRateRedefined,
    PercentileCpIn,
    PercentileCpEx,
    CitationZ,
    Nlcs,
    ReverseEngineering,
    ExchangeRateOriginal,
    Sncs1,
    Sncs2,
    Sncs3,
    Sncs3Percentile,
}

impl Method {
    pub const ALL: [Method; 17] = [
        Method::Raw,
        Method::Mean,
        Method::Median,
        Method::ZScore,
        Method::OptimizationLinear,
        Method::Rcr,
        Method::ExchangeRateRedefined,
        Method::PercentileCpIn,
        Method::PercentileCpEx,
        Method::CitationZ,
        Method::Nlcs,
        Method::ReverseEngineering,
        Method::ExchangeRateOriginal,
        Method::Sncs1,
        Method::Sncs2,
        Method::Sncs3,
        Method::Sncs3Percentile,
    ];

    /// The class each method belongs to by construction.
    pub fn linearity(self) -> Linearity {
        use Method::*;
        match self {
            Raw | Mean | Median | ZScore | OptimizationLinear | Rcr | ExchangeRateRedefined => Linearity::Linear,
            PercentileCpIn | PercentileCpEx | CitationZ | Nlcs | ReverseEngineering | ExchangeRateOriginal => {
                Linearity::Nonlinear
            }
            Sncs1 | Sncs2 | Sncs3 | Sncs3Percentile => Linearity::OutsideCategory,
        }
    }

    pub fn as_str(self) -> &'static str {
        use Method::*;
        match self {
            Raw => "raw",
            Mean => "mean",
            Median => "median",
            ZScore => "z-score",
            OptimizationLinear => "optimization-linear",
            Rcr => "rcr",
            ExchangeRateRedefined => "exchange-rate-redefined",
            PercentileCpIn => "percentile-cp-in",
            PercentileCpEx => "percentile-cp-ex",
            CitationZ => "citation-z",
            Nlcs => "nlcs",
            ReverseEngineering => "reverse-engineering",
            ExchangeRateOriginal => "exchange-rate-original",
            Sncs1 => "sncs1",
            Sncs2 => "sncs2",
            Sncs3 => "sncs3",
            Sncs3Percentile => "sncs3-percentile",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

/// Method identity, parameters, and declared linearity class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodDescriptor {
    pub method: Method,
    pub params: BTreeMap<String, String>,
    pub linearity: Linearity,
}

impl MethodDescriptor {
    pub fn new(method: Method) -> Self {
        MethodDescriptor { method, params: BTreeMap::new(), linearity: method.linearity() }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }
}

/// `y = k·x + b` with `k ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub k: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn new(k: f64, b: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "affine map needs finite nonzero k and finite b, got k={k}, b={b}"
            )));
        }
        Ok(AffineMap { k, b })
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.k * x + self.b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Fingerprint of the input the scores were computed from.
    pub source: String,
    pub n_papers: usize,
}

/// Per-paper normalized scores tagged with the producing method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSet {
    pub method: MethodDescriptor,
    pub scores: BTreeMap<String, f64>,
    /// Affine map per reference cell (keyed by the cell's display form), or
    /// per paper id for methods where every paper is its own field.
    pub maps: BTreeMap<String, AffineMap>,
    pub provenance: Provenance,
}

impl ScoreSet {
    pub fn linearity(&self) -> Linearity {
        self.method.linearity
    }

    pub fn get(&self, paper_id: &str) -> Option<f64> {
        self.scores.get(paper_id).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn cell_map(&self, cell: &ReferenceCell) -> Option<AffineMap> {
        self.maps.get(&cell.to_string()).copied()
    }

    /// Score sets read back from CSV carry no maps and no corpus fingerprint.
    fn bare(method: MethodDescriptor, scores: BTreeMap<String, f64>) -> Self {
        let n_papers = scores.len();
        ScoreSet {
            method,
            scores,
            maps: BTreeMap::new(),
            provenance: Provenance { source: "scores-csv".into(), n_papers },
        }
    }
}

/// Per-cell output of a cell-based method: scores aligned with the cell's
/// papers, plus the affine map when the method is linear.
pub(crate) struct CellScores {
    pub scores: Vec<f64>,
    pub map: Option<AffineMap>,
}

/// Runs `per_cell` over every reference cell and assembles the score set.
pub(crate) fn score_cells<F>(corpus: &Corpus, method: MethodDescriptor, mut per_cell: F) -> Result<ScoreSet>
where
    F: FnMut(&ReferenceCell, &[&Paper]) -> Result<CellScores>,
{
    let mut scores = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for (cell, papers) in corpus.cells() {
        let out = per_cell(cell, &papers)?;
        debug_assert_eq!(out.scores.len(), papers.len());
        for (paper, score) in papers.iter().zip(out.scores) {
            scores.insert(paper.paper_id.clone(), score);
        }
        if let Some(map) = out.map {
            maps.insert(cell.to_string(), map);
        }
    }
    Ok(ScoreSet {
        method,
        scores,
        maps,
        provenance: Provenance { source: corpus.fingerprint(), n_papers: corpus.len() },
    })
}

/// Applies a method that needs nothing beyond the corpus. Exchange-rate
/// methods take their interval count and band from `exchange` (its `mode` is
/// ignored); optimization-linear and reverse engineering use the pooled
/// corpus as reference. RCR and the citing-side methods need other inputs
/// and are rejected.
pub fn normalize_corpus(corpus: &Corpus, method: Method, exchange: &ExchangeRateParams) -> Result<ScoreSet> {
    use Method::*;
    let with_mode = |mode| {
        let params = ExchangeRateParams { mode, ..*exchange };
        exchange_rate(corpus, &params).map(|(_, set)| set)
    };
    match method {
        Raw => raw_citations(corpus),
        Mean => mean_based(corpus),
        Median => median_based(corpus),
        ZScore => z_score(corpus),
        OptimizationLinear => optimization_linear(corpus, &Reference::Pooled, &default_grid()).map(|r| r.scores),
        ExchangeRateRedefined => with_mode(ExchangeRateMode::Redefined),
        ExchangeRateOriginal => with_mode(ExchangeRateMode::Original),
        PercentileCpIn => percentile_rank(corpus, PercentileMode::CpIn),
        PercentileCpEx => percentile_rank(corpus, PercentileMode::CpEx),
        CitationZ => citation_zscore(corpus),
        Nlcs => nlcs(corpus),
        ReverseEngineering => reverse_engineering(corpus, &Reference::Pooled),
        Rcr | Sncs1 | Sncs2 | Sncs3 | Sncs3Percentile => {
            Err(Error::InvalidParameter(format!("`{method}` needs inputs beyond the paper corpus")))
        }
    }
}

/// Writes scores CSV, rows in `paper_id` order, scores as shortest
/// round-trip decimals.
pub fn write_scores<W: Write>(set: &ScoreSet, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    writer.write_record(SCORES_HEADER)?;
    let method = set.method.method.as_str();
    let class = set.linearity().as_str();
    for (id, score) in &set.scores {
        writer.write_record([id.as_str(), method, &score.to_string(), class])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a scores CSV back into a score set.
///
/// The file must name a single known method, and the class column must
/// match that method's declared class; otherwise the set is refused. The
/// guard never aggregates scores whose class it cannot vouch for.
pub fn parse_scores<R: Read>(source: R) -> Result<ScoreSet> {
    let rows = read_rows(source, &SCORES_HEADER)?;
    let mut method: Option<Method> = None;
    let mut scores = BTreeMap::new();
    for (line, rec) in rows {
        let m: Method = rec[1].parse().map_err(|_| Error::Refused {
            method: rec[1].to_owned(),
            linearity: rec[3].to_owned(),
            reason: "unknown method, linearity cannot be established".into(),
        })?;
        let class: Option<Linearity> = rec[3].parse().ok();
        if class != Some(m.linearity()) {
            return Err(Error::Refused {
                method: m.as_str().into(),
                linearity: rec[3].to_owned(),
                reason: format!("declared class does not match the method's class `{}`", m.linearity()),
            });
        }
        match method {
            None => method = Some(m),
            Some(prev) if prev != m => {
                return Err(Error::parse(line, format!("mixed methods `{prev}` and `{m}` in one file")))
            }
            _ => {}
        }
        let score: f64 = rec[2].parse().map_err(|_| Error::parse(line, format!("invalid score `{}`", &rec[2])))?;
        if scores.insert(rec[0].to_owned(), score).is_some() {
            return Err(Error::DuplicateId { id: rec[0].to_owned(), line });
        }
    }
    let method = method.ok_or(Error::EmptyInput)?;
    Ok(ScoreSet::bare(MethodDescriptor::new(method), scores))
}

/// Rounds to two decimals for display.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::table1_fixture;

    #[test]
    fn declared_classes() {
        use Method::*;
        for m in [Mean, Median, ZScore, OptimizationLinear, Rcr, ExchangeRateRedefined] {
            assert_eq!(m.linearity(), Linearity::Linear, "{m}");
        }
        for m in [PercentileCpIn, PercentileCpEx, CitationZ, Nlcs, ReverseEngineering, ExchangeRateOriginal] {
            assert_eq!(m.linearity(), Linearity::Nonlinear, "{m}");
        }
        for m in [Sncs1, Sncs2, Sncs3, Sncs3Percentile] {
            assert_eq!(m.linearity(), Linearity::OutsideCategory, "{m}");
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn affine_map_rejects_zero_slope() {
        assert!(AffineMap::new(0.0, 1.0).is_err());
        assert_eq!(AffineMap::new(2.0, 3.0).unwrap().apply(4.0), 11.0);
    }

    #[test]
    fn scores_csv_round_trip() {
        let set = mean_based(&table1_fixture()).unwrap();
        let mut buf = Vec::new();
        write_scores(&set, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("paper_id,method,score,linearity_class\n"));
        let back = parse_scores(buf.as_slice()).unwrap();
        assert_eq!(back.scores, set.scores);
        assert_eq!(back.linearity(), Linearity::Linear);
    }

    #[test]
    fn mismatched_or_unknown_class_is_refused() {
        let lying = "paper_id,method,score,linearity_class\na,percentile-cp-in,50,linear\n";
        assert!(parse_scores(lying.as_bytes()).unwrap_err().is_refusal());
        let unknown = "paper_id,method,score,linearity_class\na,mean,1,affine-ish\n";
        assert!(parse_scores(unknown.as_bytes()).unwrap_err().is_refusal());
        let unknown_method = "paper_id,method,score,linearity_class\na,magic,1,linear\n";
        assert!(parse_scores(unknown_method.as_bytes()).unwrap_err().is_refusal());
    }
}
