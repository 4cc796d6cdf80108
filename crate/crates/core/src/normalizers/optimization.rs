use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalizers::{score_cells, AffineMap, CellScores, Method, MethodDescriptor, Reference, ScoreSet};

/// 199 levels, 0.5% to 99.5% in steps of 0.5%.
pub fn default_grid() -> Vec<f64> {
    (1..=199).map(|i| i as f64 * 0.005).collect()
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellFit {
    pub map: AffineMap,
    /// Sum of squared quantile mismatches at the optimum.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub scores: ScoreSet,
    /// Keyed by the reference cell's display form.
    pub fits: BTreeMap<String, CellFit>,
}

/// Per cell, picks `k`, `b` minimizing `Σ_p (k·q_cell(p) + b − q_ref(p))²`
/// over the grid levels `p`, then scores `k·x + b`.
pub fn optimization_linear(corpus: &Corpus, reference: &Reference, grid: &[f64]) -> Result<OptimizationResult> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("quantile grid is empty".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("grid level {p} outside [0, 1]")));
    }
    let reference_values: Vec<f64> = reference.resolve(corpus)?.into_iter().map(|v| v as f64).collect();
    let q_ref: Vec<f64> = grid.iter().map(|&p| quantile(&reference_values, p)).collect();

    let descriptor = MethodDescriptor::new(Method::OptimizationLinear)
        .with_param("reference", if matches!(reference, Reference::Pooled) { "pooled" } else { "explicit" })
        .with_param("grid_levels", grid.len());
    let mut fits = BTreeMap::new();
    let scores = score_cells(corpus, descriptor, |cell, papers| {
        let degenerate = || Error::DegenerateCell { method: "optimization-linear", cell: cell.to_string() };
        let mut sorted: Vec<f64> = papers.iter().map(|p| p.citations as f64).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted[0] == sorted[sorted.len() - 1] {
            return Err(degenerate());
        }
        let q_cell: Vec<f64> = grid.iter().map(|&p| quantile(&sorted, p)).collect();

        let n = grid.len() as f64;
        let mean_c = q_cell.iter().sum::<f64>() / n;
        let mean_r = q_ref.iter().sum::<f64>() / n;
        let scc: f64 = q_cell.iter().map(|c| (c - mean_c).powi(2)).sum();
        let scr: f64 = q_cell.iter().zip(&q_ref).map(|(c, r)| (c - mean_c) * (r - mean_r)).sum();
        if scc == 0.0 {
            return Err(degenerate());
        }
        let k = scr / scc;
        let b = mean_r - k * mean_c;
        let map = AffineMap::new(k, b).map_err(|_| degenerate())?;
        let objective = q_cell.iter().zip(&q_ref).map(|(c, r)| (map.apply(*c) - r).powi(2)).sum();
        fits.insert(cell.to_string(), CellFit { map, objective });
        Ok(CellScores { scores: papers.iter().map(|p| map.apply(p.citations as f64)).collect(), map: Some(map) })
    })?;
    Ok(OptimizationResult { scores, fits })
}
