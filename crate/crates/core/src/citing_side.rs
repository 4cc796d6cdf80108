//! Citing-side normalization: every citation is weighted by the reference
//! intensity of the citing publication or journal, so no field
//! classification is needed.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{CitationEvent, CitationEvents};
use crate::error::{Error, Result};
use crate::normalizers::{Method, MethodDescriptor, Provenance, ScoreSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SncsVariant {
    /// `Σ 1/a_i`
    One,
    /// `Σ 1/r_i`
    Two,
    /// `Σ 1/(p_i · r_i)`
    Three,
}

impl SncsVariant {
    fn method(self) -> Method {
        match self {
            SncsVariant::One => Method::Sncs1,
            SncsVariant::Two => Method::Sncs2,
            SncsVariant::Three => Method::Sncs3,
        }
    }

    pub fn term(self, event: &CitationEvent) -> f64 {
        match self {
            SncsVariant::One => 1.0 / event.a_i,
            SncsVariant::Two => 1.0 / f64::from(event.r_i),
            SncsVariant::Three => 1.0 / (event.p_i * f64::from(event.r_i)),
        }
    }
}

/// Sums the variant's terms over a paper's events in the given order.
pub fn sncs_of(events: &[CitationEvent], variant: SncsVariant) -> f64 {
    events.iter().map(|e| variant.term(e)).sum()
}

fn check_universe(events: &CitationEvents, universe: &BTreeSet<String>) -> Result<()> {
    match events.focal_ids().find(|id| !universe.contains(*id)) {
        Some(id) => Err(Error::UnknownPaper(id.to_owned())),
        None => Ok(()),
    }
}

fn raw_sncs(
    events: &CitationEvents,
    variant: SncsVariant,
    universe: &BTreeSet<String>,
) -> Result<BTreeMap<String, f64>> {
    check_universe(events, universe)?;
    Ok(universe.iter().map(|id| (id.clone(), sncs_of(events.for_paper(id), variant))).collect())
}

fn outside_set(method: Method, scores: BTreeMap<String, f64>, n_events: usize) -> ScoreSet {
    let n_papers = scores.len();
    ScoreSet {
        method: MethodDescriptor::new(method).with_param("events", n_events),
        scores,
        maps: BTreeMap::new(),
        provenance: Provenance { source: "citation-events".into(), n_papers },
    }
}

/// Source normalized citation score for every paper in `universe`.
/// Papers without events score zero.
pub fn sncs(events: &CitationEvents, variant: SncsVariant, universe: &BTreeSet<String>) -> Result<ScoreSet> {
    let scores = raw_sncs(events, variant, universe)?;
    Ok(outside_set(variant.method(), scores, events.len()))
}

/// SNCS3 converted to CP-IN percentiles over the whole universe as one pool.
pub fn sncs3_percentile(events: &CitationEvents, universe: &BTreeSet<String>) -> Result<ScoreSet> {
    let raw = raw_sncs(events, SncsVariant::Three, universe)?;
    let mut sorted: Vec<f64> = raw.values().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let scores = raw
        .into_iter()
        .map(|(id, s)| {
            let hits = sorted.partition_point(|&v| v <= s);
            (id, 100.0 * hits as f64 / n)
        })
        .collect();
    let mut set = outside_set(Method::Sncs3Percentile, scores, events.len());
    set.method = set.method.with_param("percentile", "cp-in");
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TABLE1_ROWS;
    use crate::normalizers::round2;

    fn ev(a: f64, r: u32, p: f64) -> CitationEvent {
        CitationEvent::new(a, r, p).unwrap()
    }

    fn universe(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn direct_substitution() {
        let mut events = CitationEvents::new();
        events.push("p", ev(10.0, 20, 0.5));
        events.push("p", ev(5.0, 25, 0.8));
        events.push("q", ev(4.0, 8, 1.0));
        let u = universe(&["p", "q", "r"]);
        let s1 = sncs(&events, SncsVariant::One, &u).unwrap();
        let s2 = sncs(&events, SncsVariant::Two, &u).unwrap();
        let s3 = sncs(&events, SncsVariant::Three, &u).unwrap();
        assert!((s1.get("p").unwrap() - 0.3).abs() < 1e-15);
        assert!((s2.get("p").unwrap() - 0.09).abs() < 1e-15);
        assert!((s3.get("p").unwrap() - 0.15).abs() < 1e-15);
        assert_eq!(s1.get("q").unwrap(), 0.25);
        assert_eq!(s2.get("q").unwrap(), 0.125);
        assert_eq!(s3.get("q").unwrap(), 0.125);
        assert_eq!(s1.get("r").unwrap(), 0.0);
        assert_eq!(s3.linearity(), crate::normalizers::Linearity::OutsideCategory);
    }

    #[test]
    fn unknown_focal_paper_rejected() {
        let mut events = CitationEvents::new();
        events.push("ghost", ev(1.0, 1, 1.0));
        assert!(matches!(
            sncs(&events, SncsVariant::One, &universe(&["p"])),
            Err(Error::UnknownPaper(id)) if id == "ghost"
        ));
        assert!(sncs3_percentile(&events, &universe(&["p"])).is_err());
    }

    #[test]
    fn hybrid_percentiles() {
        let u = universe(&["a", "b", "c", "d"]);
        let tied = sncs3_percentile(&CitationEvents::new(), &u).unwrap();
        assert!(tied.scores.values().all(|&s| s == 100.0));

        let mut events = CitationEvents::new();
        for (i, id) in ["a", "b", "c", "d"].iter().enumerate() {
            for _ in 0..=i {
                events.push(*id, ev(1.0, 2, 1.0));
            }
        }
        let set = sncs3_percentile(&events, &u).unwrap();
        let values: Vec<f64> = ["a", "b", "c", "d"].iter().map(|id| set.get(id).unwrap()).collect();
        assert_eq!(values, vec![25.0, 50.0, 75.0, 100.0]);
    }

    #[test]
    fn hybrid_reproduces_table1_percentiles() {
        // one event with r = p = 1 per citation makes SNCS3 equal the citation count
        let mut events = CitationEvents::new();
        let mut ids = BTreeSet::new();
        let mut expected = Vec::new();
        let mut cumulative = 0;
        let mut next = 0;
        for &(c, n) in TABLE1_ROWS.iter() {
            cumulative += n;
            for _ in 0..n {
                let id = format!("p{next:02}");
                next += 1;
                for _ in 0..c {
                    events.push(id.clone(), ev(1.0, 1, 1.0));
                }
                ids.insert(id.clone());
                expected.push((id, round2(100.0 * cumulative as f64 / 52.0)));
            }
        }
        let set = sncs3_percentile(&events, &ids).unwrap();
        for (id, pct) in expected {
            assert_eq!(round2(set.get(&id).unwrap()), pct, "{id}");
        }
    }
}
