//! Invariants that must hold on arbitrary corpora.

use std::collections::BTreeSet;

use fieldnorm::citing_side::{sncs, sncs_of, SncsVariant};
use fieldnorm::corpus::{parse_corpus, write_corpus, CellMode, CitationEvent, CitationEvents, Corpus, Paper};
use fieldnorm::fairness::{distribution_coincidence, ks_distance, top_z_share};
use fieldnorm::linearity::{guarded_aggregate, Statistic};
use fieldnorm::normalizers::{
    self, normalize_corpus, parse_scores, percentile_rank, write_scores, ExchangeRateMode, ExchangeRateParams,
    Linearity, Method, PercentileMode, ScoreSet,
};
use proptest::prelude::*;

const CORPUS_METHODS: [Method; 12] = [
    Method::Raw,
    Method::Mean,
    Method::Median,
    Method::ZScore,
    Method::OptimizationLinear,
    Method::ExchangeRateRedefined,
    Method::PercentileCpIn,
    Method::PercentileCpEx,
    Method::CitationZ,
    Method::Nlcs,
    Method::ReverseEngineering,
    Method::ExchangeRateOriginal,
];

fn exchange_params() -> ExchangeRateParams {
    ExchangeRateParams { mode: ExchangeRateMode::Redefined, n_intervals: 4, pi_m: 3, pi_max: 4 }
}

fn build(rows: &[(u8, u64)]) -> Corpus {
    let papers = rows
        .iter()
        .enumerate()
        .map(|(i, &(field, citations))| Paper {
            paper_id: format!("p{i:03}"),
            field_id: format!("f{field}"),
            pub_year: 2020,
            doc_type: "article".into(),
            citations,
        })
        .collect();
    Corpus::new(papers, CellMode::Field).unwrap()
}

/// 1 to 3 fields, every field with at least 4 papers.
fn corpus_rows() -> impl Strategy<Value = Vec<(u8, u64)>> {
    prop::collection::vec((0u8..3, 0u64..120), 4..90).prop_filter("every field has 4+ papers", |rows| {
        (0..3).all(|f| {
            let n = rows.iter().filter(|r| r.0 == f).count();
            n == 0 || n >= 4
        })
    })
}

fn csv_of(corpus: &Corpus) -> Vec<u8> {
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf).unwrap();
    buf
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn scaled(set: &ScoreSet, c: f64) -> ScoreSet {
    let mut out = set.clone();
    for v in out.scores.values_mut() {
        *v *= c;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn scores_do_not_depend_on_row_order(rows in corpus_rows(), seed in any::<u64>()) {
        let corpus = build(&rows);
        let text = String::from_utf8(csv_of(&corpus)).unwrap();
        let mut lines: Vec<&str> = text.lines().skip(1).collect();
        // deterministic shuffle driven by the seed
        let mut state = seed | 1;
        for i in (1..lines.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            lines.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = format!("{}\n{}\n", text.lines().next().unwrap(), lines.join("\n"));
        let reparsed = parse_corpus(shuffled.as_bytes(), CellMode::Field).unwrap();
        prop_assert_eq!(reparsed.papers(), corpus.papers());
        for method in CORPUS_METHODS {
            let a = normalize_corpus(&corpus, method, &exchange_params());
            let b = normalize_corpus(&reparsed, method, &exchange_params());
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.scores, b.scores),
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                _ => prop_assert!(false, "{method}: outcome depends on row order"),
            }
        }
    }

    #[test]
    fn corpus_and_scores_round_trip(rows in corpus_rows()) {
        let corpus = build(&rows);
        let again = parse_corpus(csv_of(&corpus).as_slice(), CellMode::Field).unwrap();
        prop_assert_eq!(again.papers(), corpus.papers());
        prop_assert_eq!(again.fingerprint(), corpus.fingerprint());
        for method in CORPUS_METHODS {
            let Ok(set) = normalize_corpus(&corpus, method, &exchange_params()) else { continue };
            let mut buf = Vec::new();
            write_scores(&set, &mut buf).unwrap();
            let parsed = parse_scores(buf.as_slice()).unwrap();
            prop_assert_eq!(&parsed.scores, &set.scores);
            prop_assert_eq!(parsed.method.method, method);
        }
    }

    #[test]
    fn linear_sets_are_affine_in_every_cell(rows in corpus_rows()) {
        let corpus = build(&rows);
        for method in CORPUS_METHODS.iter().filter(|m| m.linearity() == Linearity::Linear) {
            let Ok(set) = normalize_corpus(&corpus, *method, &exchange_params()) else { continue };
            for (cell, papers) in corpus.cells() {
                let map = set.cell_map(cell).expect("linear sets record maps");
                for p in papers {
                    let y = set.get(&p.paper_id).unwrap();
                    prop_assert!(close(y, map.apply(p.citations as f64), 1e-12), "{method} {cell}");
                }
            }
        }
    }

    #[test]
    fn guarded_sum_commutes_with_the_cell_map(rows in corpus_rows(), mask in any::<u64>()) {
        let corpus = build(&rows);
        for method in CORPUS_METHODS.iter().filter(|m| m.linearity() == Linearity::Linear) {
            let Ok(set) = normalize_corpus(&corpus, *method, &exchange_params()) else { continue };
            for (cell, papers) in corpus.cells() {
                let group: Vec<&Paper> = papers
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> (i % 64) & 1 == 1)
                    .map(|(_, p)| *p)
                    .collect();
                if group.is_empty() {
                    continue;
                }
                let ids: Vec<&str> = group.iter().map(|p| p.paper_id.as_str()).collect();
                let map = set.cell_map(cell).unwrap();
                let raw: f64 = group.iter().map(|p| p.citations as f64).sum();
                let n = group.len() as f64;
                let sum = guarded_aggregate(&set, &ids, Statistic::Sum).unwrap().value;
                let mean = guarded_aggregate(&set, &ids, Statistic::Mean).unwrap().value;
                prop_assert!(close(sum, map.k * raw + n * map.b, 1e-9));
                prop_assert!(close(mean, map.k * raw / n + map.b, 1e-9));
            }
        }
    }

    #[test]
    fn nonlinear_sets_are_always_refused(rows in corpus_rows()) {
        let corpus = build(&rows);
        let ids: Vec<&str> = corpus.papers().iter().map(|p| p.paper_id.as_str()).collect();
        for method in CORPUS_METHODS.iter().filter(|m| m.linearity() == Linearity::Nonlinear) {
            let Ok(set) = normalize_corpus(&corpus, *method, &exchange_params()) else { continue };
            for stat in [Statistic::Sum, Statistic::Mean] {
                let err = guarded_aggregate(&set, &ids, stat).unwrap_err();
                prop_assert!(err.is_refusal());
            }
        }
    }

    #[test]
    fn most_cited_paper_keeps_the_top_score(rows in corpus_rows()) {
        let corpus = build(&rows);
        // monotone methods; exchange-rate original rescales intervals independently
        let monotone = CORPUS_METHODS.iter().filter(|m| **m != Method::ExchangeRateOriginal);
        for method in monotone {
            let Ok(set) = normalize_corpus(&corpus, *method, &exchange_params()) else { continue };
            for (cell, papers) in corpus.cells() {
                let top = papers.iter().map(|p| p.citations).max().unwrap();
                let best = papers.iter().map(|p| set.get(&p.paper_id).unwrap()).fold(f64::MIN, f64::max);
                for p in papers.iter().filter(|p| p.citations == top) {
                    prop_assert!(close(set.get(&p.paper_id).unwrap(), best, 1e-12), "{method} {cell}");
                }
                // and order is preserved pairwise
                for a in &papers {
                    for b in &papers {
                        if a.citations < b.citations {
                            let (ya, yb) = (set.get(&a.paper_id).unwrap(), set.get(&b.paper_id).unwrap());
                            prop_assert!(ya <= yb + 1e-12 * (1.0 + yb.abs()), "{method} {cell}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn percentiles_live_on_the_cell_grid(rows in corpus_rows()) {
        let corpus = build(&rows);
        let cp_in = percentile_rank(&corpus, PercentileMode::CpIn).unwrap();
        let cp_ex = percentile_rank(&corpus, PercentileMode::CpEx).unwrap();
        for (_, papers) in corpus.cells() {
            let n = papers.len() as f64;
            for p in &papers {
                let (hi, lo) = (cp_in.get(&p.paper_id).unwrap(), cp_ex.get(&p.paper_id).unwrap());
                let ties = papers.iter().filter(|q| q.citations == p.citations).count() as f64;
                prop_assert!(close(hi - lo, 100.0 * ties / n, 1e-12));
                prop_assert!(hi >= 100.0 / n - 1e-12 && hi <= 100.0);
                prop_assert!((0.0..100.0).contains(&lo));
                let steps = hi * n / 100.0;
                prop_assert!((steps - steps.round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn top_share_ignores_positive_rescaling(rows in corpus_rows(), c in 0.01f64..100.0, z in 1.0f64..60.0) {
        let corpus = build(&rows);
        let raw = normalizers::raw_citations(&corpus).unwrap();
        let a = top_z_share(&raw, &corpus, z).unwrap();
        let b = top_z_share(&scaled(&raw, c), &corpus, z).unwrap();
        prop_assert_eq!(a.slots, b.slots);
        for (fa, fb) in a.fields.iter().zip(&b.fields) {
            prop_assert!(close(fa.top_count, fb.top_count, 1e-12));
        }
        let total: f64 = a.fields.iter().map(|f| f.top_count).sum();
        prop_assert!(close(total, a.slots as f64, 1e-12));
        if corpus.fields().len() >= 2 {
            let ka = distribution_coincidence(&raw, &corpus).unwrap().max_distance;
            let kb = distribution_coincidence(&scaled(&raw, c), &corpus).unwrap().max_distance;
            prop_assert!(close(ka, kb, 1e-12));
        }
    }

    #[test]
    fn ks_is_a_symmetric_bounded_distance(
        mut a in prop::collection::vec(0u32..50, 1..60),
        mut b in prop::collection::vec(0u32..50, 1..60),
    ) {
        a.sort_unstable();
        b.sort_unstable();
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let d = ks_distance(&a, &b);
        prop_assert_eq!(d, ks_distance(&b, &a));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_distance(&a, &a), 0.0);
    }

    #[test]
    fn sncs_is_additive_over_events(
        events in prop::collection::vec((0.1f64..500.0, 1u32..300, 0.01f64..=1.0), 0..40),
        split in 0usize..40,
    ) {
        let events: Vec<CitationEvent> =
            events.into_iter().map(|(a, r, p)| CitationEvent::new(a, r, p).unwrap()).collect();
        let split = split.min(events.len());
        for variant in [SncsVariant::One, SncsVariant::Two, SncsVariant::Three] {
            let whole = sncs_of(&events, variant);
            let parts = sncs_of(&events[..split], variant) + sncs_of(&events[split..], variant);
            prop_assert!(close(whole, parts, 1e-12));
            prop_assert!(whole >= 0.0);
        }
        // p_i ≤ 1 weights every SNCS3 term at least as much as SNCS2's
        prop_assert!(sncs_of(&events, SncsVariant::Three) >= sncs_of(&events, SncsVariant::Two) * (1.0 - 1e-12));

        let mut grouped = CitationEvents::new();
        for e in &events {
            grouped.push("focal", *e);
        }
        let universe: BTreeSet<String> = ["focal".to_owned(), "uncited".to_owned()].into();
        let set = sncs(&grouped, SncsVariant::Two, &universe).unwrap();
        prop_assert_eq!(set.get("uncited"), Some(0.0));
        prop_assert_eq!(set.linearity(), Linearity::OutsideCategory);
    }
}
