use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::Serialize;

use crate::corpus::{parse_field, read_rows};
use crate::error::{Error, Result};
use crate::normalizers::{AffineMap, Method, MethodDescriptor, Provenance, ScoreSet};

pub const RCR_HEADER: [&str; 5] = ["paper_id", "acr", "fcr", "is_benchmark", "citations"];

/// Per-paper inputs for the relative citation ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct RcrInput {
    pub paper_id: String,
    /// Article citation rate (mean citations per year).
    pub acr: f64,
    /// Field citation rate from the paper's cocitation network.
    pub fcr: f64,
    pub is_benchmark: bool,
    pub citations: u64,
}

/// Benchmark regression `acr = beta · fcr + alpha_reg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RcrFit {
    pub beta: f64,
    pub alpha_reg: f64,
}

impl RcrFit {
    /// Expected citation rate for a paper with the given field rate.
    pub fn ecr(&self, fcr: f64) -> f64 {
        self.beta * fcr + self.alpha_reg
    }
}

fn parse_bool(line: u64, raw: &str) -> Result<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Ok(true),
        "0" | "false" | "no" | "n" => Ok(false),
        _ => Err(Error::parse(line, format!("invalid is_benchmark `{raw}`"))),
    }
}

/// Parses `paper_id,acr,fcr,is_benchmark,citations`.
pub fn parse_rcr_inputs<R: Read>(source: R) -> Result<Vec<RcrInput>> {
    let rows = read_rows(source, &RCR_HEADER)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    let mut inputs = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        let acr: f64 = parse_field(line, "acr", &rec[1])?;
        let fcr: f64 = parse_field(line, "fcr", &rec[2])?;
        let citations: i64 = parse_field(line, "citations", &rec[4])?;
        if !(acr >= 0.0 && acr.is_finite()) {
            return Err(Error::parse(line, format!("acr must be nonnegative, got {acr}")));
        }
        if !(fcr > 0.0 && fcr.is_finite()) {
            return Err(Error::parse(line, format!("fcr must be positive, got {fcr}")));
        }
        if citations < 0 {
            return Err(Error::parse(line, format!("negative citations {citations}")));
        }
        if !seen.insert(rec[0].to_owned()) {
            return Err(Error::DuplicateId { id: rec[0].to_owned(), line });
        }
        inputs.push(RcrInput {
            paper_id: rec[0].to_owned(),
            acr,
            fcr,
            is_benchmark: parse_bool(line, &rec[3])?,
            citations: citations as u64,
        });
    }
    Ok(inputs)
}

/// Fits the benchmark regression by ordinary least squares and scores
/// every paper as `x / ecr`. Each paper carries its own map `k = 1/ecr`.
pub fn rcr(inputs: &[RcrInput]) -> Result<(RcrFit, ScoreSet)> {
    let benchmarks: Vec<(f64, f64)> = inputs.iter().filter(|i| i.is_benchmark).map(|i| (i.fcr, i.acr)).collect();
    if benchmarks.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "RCR needs at least 2 benchmark papers, got {}",
            benchmarks.len()
        )));
    }
    let n = benchmarks.len() as f64;
    let mean_f = benchmarks.iter().map(|b| b.0).sum::<f64>() / n;
    let mean_a = benchmarks.iter().map(|b| b.1).sum::<f64>() / n;
    let sff: f64 = benchmarks.iter().map(|b| (b.0 - mean_f).powi(2)).sum();
    let sfa: f64 = benchmarks.iter().map(|b| (b.0 - mean_f) * (b.1 - mean_a)).sum();
    if sff == 0.0 {
        return Err(Error::UnidentifiableSlope);
    }
    let beta = sfa / sff;
    let fit = RcrFit { beta, alpha_reg: mean_a - beta * mean_f };

    let mut scores = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for input in inputs {
        let ecr = fit.ecr(input.fcr);
        if ecr.is_nan() || ecr <= 0.0 {
            return Err(Error::NonPositiveEcr { paper_id: input.paper_id.clone(), ecr });
        }
        scores.insert(input.paper_id.clone(), input.citations as f64 / ecr);
        maps.insert(input.paper_id.clone(), AffineMap::new(1.0 / ecr, 0.0)?);
    }
    let descriptor = MethodDescriptor::new(Method::Rcr).with_param("beta", fit.beta).with_param("alpha", fit.alpha_reg);
    let set = ScoreSet {
        method: descriptor,
        scores,
        maps,
        provenance: Provenance { source: "rcr-inputs".into(), n_papers: inputs.len() },
    };
    Ok((fit, set))
}
