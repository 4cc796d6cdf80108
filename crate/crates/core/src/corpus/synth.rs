use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{CellMode, Corpus, Paper};
use crate::error::{Error, Result};

/// Citation-count family for one synthetic field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    /// `round(exp(N(mu, sigma^2)))`.
    Lognormal { mu: f64, sigma: f64 },
    /// Gamma-Poisson mixture with `r` successes and success probability `p`.
    NegativeBinomial { r: f64, p: f64 },
}

impl Family {
    fn validate(&self) -> Result<()> {
        match *self {
            Family::Lognormal { mu, sigma } => {
                if !mu.is_finite() || !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "lognormal needs finite mu and sigma > 0, got mu={mu}, sigma={sigma}"
                    )));
                }
            }
            Family::NegativeBinomial { r, p } => {
                if !(r.is_finite() && r > 0.0) || !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "negative-binomial needs r > 0 and 0 < p < 1, got r={r}, p={p}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match *self {
            Family::Lognormal { mu, sigma } => {
                let dist = LogNormal::new(mu, sigma).expect("validated");
                let x: f64 = dist.sample(rng);
                x.round().min(u64::MAX as f64) as u64
            }
            Family::NegativeBinomial { r, p } => {
                let gamma = Gamma::new(r, (1.0 - p) / p).expect("validated");
                let lambda: f64 = gamma.sample(rng);
                if lambda <= 0.0 {
                    return 0;
                }
                let count: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
                count as u64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub field_id: String,
    pub count: usize,
    #[serde(flatten)]
    pub family: Family,
}

/// Recipe for a seeded synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    pub seed: u64,
    pub fields: Vec<FieldSpec>,
}

impl SynthesisSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Three lognormal fields with distinct citation practices.
    pub fn default_three_field(seed: u64, count: usize) -> Self {
        let field =
            |id: &str, mu, sigma| FieldSpec { field_id: id.into(), count, family: Family::Lognormal { mu, sigma } };
        SynthesisSpec {
            seed,
            fields: vec![field("biology", 2.5, 1.0), field("mathematics", 1.6, 0.9), field("physics", 2.0, 1.1)],
        }
    }
}

/// Draws a corpus from `spec`. Every paper lands in a single year and
/// document type, so each field is one reference cell under any cell mode.
pub fn synthesize_corpus(spec: &SynthesisSpec) -> Result<Corpus> {
    if spec.fields.is_empty() {
        return Err(Error::InvalidParameter("synthesis spec has no fields".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut papers = Vec::new();
    for field in &spec.fields {
        if field.count == 0 {
            return Err(Error::InvalidParameter(format!("field `{}` has paper count 0", field.field_id)));
        }
        if field.field_id.is_empty() {
            return Err(Error::InvalidParameter("empty field_id".into()));
        }
        field.family.validate()?;
        let width = field.count.to_string().len().max(5);
        for i in 0..field.count {
            papers.push(Paper {
                paper_id: format!("{}-{:0width$}", field.field_id, i + 1),
                field_id: field.field_id.clone(),
                pub_year: 2020,
                doc_type: "article".into(),
                citations: field.family.sample(&mut rng),
            });
        }
    }
    Corpus::new(papers, CellMode::default())
}
