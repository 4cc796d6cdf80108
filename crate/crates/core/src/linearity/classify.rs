use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::linearity::equidistance::{check_equidistance, Witness};
use crate::normalizers::{AffineMap, Method, ScoreSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellClass {
    Linear,
    Nonlinear,
    /// Fewer than 3 distinct citation values, or a constant mapping.
    Degenerate,
}

impl CellClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CellClass::Linear => "linear",
            CellClass::Nonlinear => "nonlinear",
            CellClass::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellVerdict {
    pub cell: String,
    pub class: CellClass,
    pub fitted: Option<AffineMap>,
    pub max_residual: Option<f64>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub method: Method,
    pub cells: Vec<CellVerdict>,
    /// Distinct `(cell, x, y)` points, for plotting the mapping.
    pub mapping: Vec<(String, u64, f64)>,
}

impl Classification {
    /// Nonlinear if any cell is nonlinear, Linear if at least one cell is
    /// linear and none nonlinear, Degenerate otherwise.
    pub fn overall(&self) -> CellClass {
        if self.cells.iter().any(|c| c.class == CellClass::Nonlinear) {
            CellClass::Nonlinear
        } else if self.cells.iter().any(|c| c.class == CellClass::Linear) {
            CellClass::Linear
        } else {
            CellClass::Degenerate
        }
    }

    /// Writes `cell,method,verdict,k,b,max_residual`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(["cell", "method", "verdict", "k", "b", "max_residual"])?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for c in &self.cells {
            w.write_record([
                c.cell.as_str(),
                self.method.as_str(),
                c.class.as_str(),
                &opt(c.fitted.map(|f| f.k)),
                &opt(c.fitted.map(|f| f.b)),
                &opt(c.max_residual),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the mapping table `cell,x,y`.
    pub fn write_mapping_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(["cell", "x", "y"])?;
        for (cell, x, y) in &self.mapping {
            w.write_record([cell.as_str(), &x.to_string(), &y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the equidistance check on `raw citations → score` in every cell.
pub fn classify_linearity(scores: &ScoreSet, corpus: &Corpus, tolerance: f64) -> Result<Classification> {
    let mut cells = Vec::new();
    let mut mapping = Vec::new();
    for (cell, papers) in corpus.cells() {
        let key = cell.to_string();
        let mut pairs = Vec::with_capacity(papers.len());
        for p in &papers {
            let y = scores.get(&p.paper_id).ok_or_else(|| Error::UnknownPaper(p.paper_id.clone()))?;
            pairs.push((p.citations as f64, y));
        }
        let distinct: BTreeSet<(u64, u64)> =
            papers.iter().zip(&pairs).map(|(p, &(_, y))| (p.citations, y.to_bits())).collect();
        mapping.extend(distinct.into_iter().map(|(x, y)| (key.clone(), x, f64::from_bits(y))));

        let verdict = match check_equidistance(&pairs, tolerance) {
            Ok(v) => CellVerdict {
                cell: key,
                class: if v.is_equidistant { CellClass::Linear } else { CellClass::Nonlinear },
                fitted: Some(v.fitted),
                max_residual: Some(v.max_residual),
                witness: v.witness,
            },
            Err(Error::InsufficientData(_) | Error::ConstantMap) => {
                CellVerdict { cell: key, class: CellClass::Degenerate, fitted: None, max_residual: None, witness: None }
            }
            Err(e) => return Err(e),
        };
        cells.push(verdict);
    }
    Ok(Classification { method: scores.method.method, cells, mapping })
}
