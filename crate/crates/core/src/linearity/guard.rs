use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalizers::{Linearity, Method, ScoreSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Sum,
    Mean,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Statistic::Sum),
            "mean" => Ok(Statistic::Mean),
            other => Err(Error::InvalidParameter(format!("unknown statistic `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub method: Method,
    pub statistic: Statistic,
    pub value: f64,
    pub group_size: usize,
    /// Set when the scores are outside the linear/nonlinear taxonomy but
    /// additive by construction.
    pub advisory: Option<String>,
}

const SNCS_ADVISORY: &str = "citing-side scores fall outside the linear/nonlinear taxonomy; \
                             aggregated because each score is a plain sum over citation events";

/// Sums or averages scores over `group`, refusing score sets whose
/// linearity class makes those statistics invalid.
pub fn guarded_aggregate<S: AsRef<str>>(
    scores: &ScoreSet,
    group: &[S],
    statistic: Statistic,
) -> Result<AggregateResult> {
    let method = scores.method.method;
    let declared = scores.method.linearity;
    let advisory = match (method, declared) {
        // fail closed when the tag disagrees with the method
        (m, d) if m.linearity() != d => return Err(Error::refused(m.as_str(), d)),
        (_, Linearity::Linear) => None,
        (Method::Sncs1 | Method::Sncs2 | Method::Sncs3, Linearity::OutsideCategory) => Some(SNCS_ADVISORY.to_owned()),
        (m, d) => return Err(Error::refused(m.as_str(), d)),
    };

    let mut total = 0.0;
    for id in group {
        total += scores.get(id.as_ref()).ok_or_else(|| Error::UnknownPaper(id.as_ref().to_owned()))?;
    }
    let value = match statistic {
        Statistic::Sum => total,
        Statistic::Mean if group.is_empty() => {
            return Err(Error::InvalidParameter("mean over an empty group is undefined".into()))
        }
        Statistic::Mean => total / group.len() as f64,
    };
    Ok(AggregateResult { method, statistic, value, group_size: group.len(), advisory })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citing_side::{sncs, sncs3_percentile, SncsVariant};
    use crate::corpus::{table1_fixture, CitationEvent, CitationEvents, Corpus};
    use crate::normalizers::{mean_based, percentile_rank, round2, PercentileMode};

    fn id_with(corpus: &Corpus, citations: u64) -> String {
        corpus.papers().iter().find(|p| p.citations == citations).unwrap().paper_id.clone()
    }

    #[test]
    fn linear_sums_mirror_raw_sums() {
        let corpus = table1_fixture();
        let set = mean_based(&corpus).unwrap();
        let ab = guarded_aggregate(&set, &[id_with(&corpus, 42), id_with(&corpus, 1)], Statistic::Sum).unwrap();
        let cd = guarded_aggregate(&set, &[id_with(&corpus, 43), id_with(&corpus, 0)], Statistic::Sum).unwrap();
        assert_eq!(round2(ab.value), 3.00);
        assert!((ab.value - cd.value).abs() < 1e-12);
        assert!(ab.advisory.is_none());
    }

    #[test]
    fn nonlinear_sets_refused() {
        let corpus = table1_fixture();
        let set = percentile_rank(&corpus, PercentileMode::CpIn).unwrap();
        let group = [id_with(&corpus, 1)];
        for stat in [Statistic::Sum, Statistic::Mean] {
            let err = guarded_aggregate(&set, &group, stat).unwrap_err();
            assert!(err.is_refusal());
            assert!(err.to_string().contains("percentile-cp-in"));
        }
    }

    #[test]
    fn empty_group() {
        let set = mean_based(&table1_fixture()).unwrap();
        let none: [&str; 0] = [];
        let r = guarded_aggregate(&set, &none, Statistic::Sum).unwrap();
        assert_eq!((r.value, r.group_size), (0.0, 0));
        assert!(guarded_aggregate(&set, &none, Statistic::Mean).is_err());
    }

    #[test]
    fn unknown_paper() {
        let set = mean_based(&table1_fixture()).unwrap();
        assert!(matches!(guarded_aggregate(&set, &["nope"], Statistic::Sum), Err(Error::UnknownPaper(_))));
    }

    #[test]
    fn outside_category_rules() {
        let mut events = CitationEvents::new();
        events.push("a", CitationEvent::new(2.0, 4, 0.5).unwrap());
        let universe = ["a".to_string(), "b".to_string()].into_iter().collect();
        let plain = sncs(&events, SncsVariant::Three, &universe).unwrap();
        let r = guarded_aggregate(&plain, &["a", "b"], Statistic::Mean).unwrap();
        assert!(r.advisory.is_some());
        assert!((r.value - 0.25).abs() < 1e-15);

        let hybrid = sncs3_percentile(&events, &universe).unwrap();
        assert!(guarded_aggregate(&hybrid, &["a"], Statistic::Sum).unwrap_err().is_refusal());
    }

    #[test]
    fn mislabelled_set_refused() {
        let corpus = table1_fixture();
        let mut set = percentile_rank(&corpus, PercentileMode::CpIn).unwrap();
        set.method.linearity = Linearity::Linear;
        assert!(guarded_aggregate(&set, &[id_with(&corpus, 1)], Statistic::Sum).unwrap_err().is_refusal());
    }
}
