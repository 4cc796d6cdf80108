use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalizers::AffineMap;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Evidence that a mapping is not an equidistant transformation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `x_j - x_i = x_n - x_m`, yet `y_j - y_i != y_n - y_m`.
    EqualSpacing { x_i: f64, x_j: f64, x_m: f64, x_n: f64, gap_ij: f64, gap_mn: f64 },
    /// No two observed pairs share a spacing; three consecutive points with
    /// different slopes instead.
    SlopeChange { x: [f64; 3], slopes: [f64; 2] },
    /// One input value observed with two different outputs.
    MultiValued { x: f64, y_low: f64, y_high: f64 },
}

impl Witness {
    /// Size of the violation: gap difference, slope difference, or output spread.
    pub fn violation(&self) -> f64 {
        match self {
            Witness::EqualSpacing { gap_ij, gap_mn, .. } => (gap_ij - gap_mn).abs(),
            Witness::SlopeChange { slopes, .. } => (slopes[0] - slopes[1]).abs(),
            Witness::MultiValued { y_low, y_high, .. } => y_high - y_low,
        }
    }

    /// Recomputes the witness from `pairs` and checks that it reproduces the
    /// reported values exactly.
    pub fn verify(&self, pairs: &[(f64, f64)]) -> bool {
        let lookup = |x: f64| -> Option<f64> {
            let mut ys = pairs.iter().filter(|p| p.0 == x).map(|p| p.1);
            let first = ys.next()?;
            ys.all(|y| y == first).then_some(first)
        };
        match *self {
            Witness::EqualSpacing { x_i, x_j, x_m, x_n, gap_ij, gap_mn } => {
                let (Some(yi), Some(yj), Some(ym), Some(yn)) = (lookup(x_i), lookup(x_j), lookup(x_m), lookup(x_n))
                else {
                    return false;
                };
                x_j - x_i == x_n - x_m && yj - yi == gap_ij && yn - ym == gap_mn && gap_ij != gap_mn
            }
            Witness::SlopeChange { x, slopes } => {
                let (Some(y0), Some(y1), Some(y2)) = (lookup(x[0]), lookup(x[1]), lookup(x[2])) else {
                    return false;
                };
                (y1 - y0) / (x[1] - x[0]) == slopes[0]
                    && (y2 - y1) / (x[2] - x[1]) == slopes[1]
                    && slopes[0] != slopes[1]
            }
            Witness::MultiValued { x, y_low, y_high } => {
                let ys: Vec<f64> = pairs.iter().filter(|p| p.0 == x).map(|p| p.1).collect();
                ys.contains(&y_low) && ys.contains(&y_high) && y_low != y_high
            }
        }
    }
}

/// Outcome of checking whether observed `(x, y)` pairs lie on one line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquidistanceVerdict {
    pub is_equidistant: bool,
    /// Least-squares line through the points.
    pub fitted: AffineMap,
    pub max_residual: f64,
    /// Residual threshold actually applied: `tolerance · (1 + max|y|)`.
    pub threshold: f64,
    pub witness: Option<Witness>,
}

/// Ordinary least squares `y ≈ k·x + b`.
pub(crate) fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let k = sxy / sxx;
    (k, mean_y - k * mean_x)
}

/// Checks whether the map `x → y` is an equidistant (affine) transformation.
///
/// The pairs may repeat an `x`; repeated inputs must agree on `y` within the
/// threshold or the map is reported with a [`Witness::MultiValued`].
pub fn check_equidistance(pairs: &[(f64, f64)], tolerance: f64) -> Result<EquidistanceVerdict> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidParameter("pairs must be finite".into()));
    }
    let max_abs_y = pairs.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let threshold = tolerance * (1.0 + max_abs_y);

    // Collapse repeated x; keep the extreme outputs to detect conflicts.
    let mut by_x: BTreeMap<u64, (f64, f64, f64)> = BTreeMap::new();
    for &(x, y) in pairs {
        let x = if x == 0.0 { 0.0 } else { x };
        by_x.entry(ordered_bits(x))
            .and_modify(|e| {
                e.1 = e.1.min(y);
                e.2 = e.2.max(y);
            })
            .or_insert((x, y, y));
    }
    if by_x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "equidistance check needs at least 3 distinct x values, got {}",
            by_x.len()
        )));
    }
    let conflict = by_x
        .values()
        .filter(|e| e.2 - e.1 > threshold)
        .max_by(|a, b| (a.2 - a.1).total_cmp(&(b.2 - b.1)))
        .map(|&(x, lo, hi)| Witness::MultiValued { x, y_low: lo, y_high: hi });

    // For consistent inputs the first-seen y stands for the point.
    let mut first_y: BTreeMap<u64, f64> = BTreeMap::new();
    for &(x, y) in pairs {
        let x = if x == 0.0 { 0.0 } else { x };
        first_y.entry(ordered_bits(x)).or_insert(y);
    }
    let points: Vec<(f64, f64)> = by_x.iter().map(|(bits, e)| (e.0, first_y[bits])).collect();

    let (k, b) = ols(pairs);
    let max_residual = pairs.iter().map(|&(x, y)| (y - (k * x + b)).abs()).fold(0.0, f64::max);

    if conflict.is_none() && max_residual <= threshold {
        let y0 = points[0].1;
        if points.iter().all(|p| (p.1 - y0).abs() <= threshold) {
            return Err(Error::ConstantMap);
        }
        return Ok(EquidistanceVerdict {
            is_equidistant: true,
            fitted: AffineMap { k, b },
            max_residual,
            threshold,
            witness: None,
        });
    }

    let witness =
        conflict.or_else(|| equal_spacing_witness(&points, threshold)).unwrap_or_else(|| slope_witness(&points));
    Ok(EquidistanceVerdict {
        is_equidistant: false,
        fitted: AffineMap { k, b },
        max_residual,
        threshold,
        witness: Some(witness),
    })
}

/// Maps an f64 to bits whose unsigned order matches numeric order.
fn ordered_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Among all pairs of observed points sharing a spacing, the two whose
/// output gaps differ most. Spacings are scanned in ascending order and a
/// later candidate must beat the incumbent by more than rounding noise.
fn equal_spacing_witness(points: &[(f64, f64)], threshold: f64) -> Option<Witness> {
    // spacing -> (min gap, its pair), (max gap, its pair)
    type Extreme = (f64, (usize, usize));
    // violation and the two index pairs
    type Candidate = (f64, (usize, usize), (usize, usize));
    let mut spacings: BTreeMap<u64, (Extreme, Extreme)> = BTreeMap::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[j].0 - points[i].0;
            let gap = points[j].1 - points[i].1;
            spacings
                .entry(ordered_bits(d))
                .and_modify(|(lo, hi)| {
                    if gap < lo.0 {
                        *lo = (gap, (i, j));
                    }
                    if gap > hi.0 {
                        *hi = (gap, (i, j));
                    }
                })
                .or_insert(((gap, (i, j)), (gap, (i, j))));
        }
    }
    let noise = threshold * 1e-3;
    let mut best: Option<Candidate> = None;
    for (lo, hi) in spacings.values() {
        let violation = hi.0 - lo.0;
        if violation > threshold && best.is_none_or(|b| violation > b.0 + noise) {
            // report the larger gap first
            best = Some((violation, hi.1, lo.1));
        }
    }
    best.map(|(_, (i, j), (m, n))| Witness::EqualSpacing {
        x_i: points[i].0,
        x_j: points[j].0,
        x_m: points[m].0,
        x_n: points[n].0,
        gap_ij: points[j].1 - points[i].1,
        gap_mn: points[n].1 - points[m].1,
    })
}

/// Consecutive triple with the largest change in slope.
fn slope_witness(points: &[(f64, f64)]) -> Witness {
    let mut best: Option<(f64, usize)> = None;
    for t in 0..points.len() - 2 {
        let (a, b, c) = (points[t], points[t + 1], points[t + 2]);
        let s1 = (b.1 - a.1) / (b.0 - a.0);
        let s2 = (c.1 - b.1) / (c.0 - b.0);
        let change = (s2 - s1).abs();
        if best.is_none_or(|(v, _)| change > v) {
            best = Some((change, t));
        }
    }
    let t = best.expect("at least 3 points").1;
    let (a, b, c) = (points[t], points[t + 1], points[t + 2]);
    Witness::SlopeChange { x: [a.0, b.0, c.0], slopes: [(b.1 - a.1) / (b.0 - a.0), (c.1 - b.1) / (c.0 - b.0)] }
}
