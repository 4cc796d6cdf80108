//! Tests of how well a normalization removes between-field differences:
//! each field's share of the global top z%, and the distance between the
//! fields' score distributions.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::normalizers::{Method, ScoreSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldShare {
    pub field: String,
    pub n: usize,
    /// Papers of this field in the top set; fractional when the field has
    /// papers tied at the cutoff score.
    pub top_count: f64,
    /// `top_count / n · 100`.
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    pub method: Method,
    pub z: f64,
    pub n_papers: usize,
    /// Size of the top set, `ceil(z · N / 100)`.
    pub slots: usize,
    pub fields: Vec<FieldShare>,
    /// Largest `|proportion - z|` over fields.
    pub max_abs_deviation: f64,
}

impl FairnessReport {
    /// Writes `field,n,top_count,proportion`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(["field", "n", "top_count", "proportion"])?;
        for f in &self.fields {
            w.write_record([f.field.as_str(), &f.n.to_string(), &f.top_count.to_string(), &f.proportion.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn field_scores(scores: &ScoreSet, corpus: &Corpus) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut by_field: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for p in corpus.papers() {
        let s = scores.get(&p.paper_id).ok_or_else(|| Error::UnknownPaper(p.paper_id.clone()))?;
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("paper `{}` has non-finite score", p.paper_id)));
        }
        by_field.entry(p.field_id.clone()).or_default().push(s);
    }
    Ok(by_field)
}

/// Ranks all papers of all fields by score and reports how many of each
/// field's papers fall in the global top z%.
///
/// Papers tied at the cutoff score share the remaining slots in proportion
/// to each field's number of tied papers, so attributions always sum to the
/// slot count.
pub fn top_z_share(scores: &ScoreSet, corpus: &Corpus, z: f64) -> Result<FairnessReport> {
    if !(z > 0.0 && z < 100.0) {
        return Err(Error::InvalidParameter(format!("z must lie in (0, 100), got {z}")));
    }
    let by_field = field_scores(scores, corpus)?;
    let n_papers = corpus.len();
    // guard against z·N/100 landing a hair above an integer
    let slots = ((z * n_papers as f64 / 100.0) - 1e-9).ceil().max(1.0) as usize;

    let mut all: Vec<f64> = by_field.values().flatten().copied().collect();
    all.sort_by(|a, b| b.total_cmp(a));
    let cutoff = all[slots - 1];
    let above_total = all.iter().filter(|&&s| s > cutoff).count();
    let tied_total = all.iter().filter(|&&s| s == cutoff).count();
    let remaining = (slots - above_total) as f64;

    let mut fields = Vec::with_capacity(by_field.len());
    for (field, values) in &by_field {
        let above = values.iter().filter(|&&s| s > cutoff).count() as f64;
        let tied = values.iter().filter(|&&s| s == cutoff).count() as f64;
        let top_count = above + remaining * tied / tied_total as f64;
        fields.push(FieldShare {
            field: field.clone(),
            n: values.len(),
            top_count,
            proportion: 100.0 * top_count / values.len() as f64,
        });
    }
    let max_abs_deviation = fields.iter().map(|f| (f.proportion - z).abs()).fold(0.0, f64::max);
    Ok(FairnessReport { method: scores.method.method, z, n_papers, slots, fields, max_abs_deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldCdf {
    pub field: String,
    /// `(score, cumulative fraction)` at each distinct score.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub method: Method,
    pub fields: Vec<FieldCdf>,
    /// Largest Kolmogorov-Smirnov distance over all field pairs.
    pub max_distance: f64,
    pub max_pair: (String, String),
}

impl CoincidenceReport {
    /// Writes `field,score,cum_fraction`.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
        w.write_record(["field", "score", "cum_fraction"])?;
        for f in &self.fields {
            for (score, frac) in &f.points {
                w.write_record([f.field.as_str(), &score.to_string(), &frac.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Two-sample Kolmogorov-Smirnov statistic `sup_v |F_a(v) - F_b(v)|` for
/// ascending-sorted samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

fn ecdf_points(sorted: &[f64]) -> Vec<(f64, f64)> {
    let n = sorted.len() as f64;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match points.last_mut() {
            Some(last) if last.0 == v => last.1 = frac,
            _ => points.push((v, frac)),
        }
    }
    points
}

/// Per-field empirical CDFs of the scores and the largest pairwise
/// Kolmogorov-Smirnov distance between them.
pub fn distribution_coincidence(scores: &ScoreSet, corpus: &Corpus) -> Result<CoincidenceReport> {
    let mut by_field = field_scores(scores, corpus)?;
    if by_field.len() < 2 {
        return Err(Error::InsufficientData("distribution coincidence needs at least 2 fields".into()));
    }
    for values in by_field.values_mut() {
        values.sort_by(f64::total_cmp);
    }
    let names: Vec<&String> = by_field.keys().collect();
    let mut max_distance = -1.0;
    let mut max_pair = (String::new(), String::new());
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            let d = ks_distance(&by_field[names[i]], &by_field[names[j]]);
            if d > max_distance {
                max_distance = d;
                max_pair = (names[i].clone(), names[j].clone());
            }
        }
    }
    Ok(CoincidenceReport {
        method: scores.method.method,
        fields: by_field
            .iter()
            .map(|(field, values)| FieldCdf { field: field.clone(), points: ecdf_points(values) })
            .collect(),
        max_distance,
        max_pair,
    })
}
