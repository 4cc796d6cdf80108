use std::collections::BTreeMap;
use std::io::Read;

use crate::corpus::{parse_field, read_rows};
use crate::error::{Error, Result};

pub const EVENTS_HEADER: [&str; 4] = ["focal_id", "a_i", "r_i", "p_i"];

/// One citation received by a focal paper, with the citing-side
/// denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CitationEvent {
    /// Mean number of active references in the citing journal-year.
    pub a_i: f64,
    /// Active references in the citing publication.
    pub r_i: u32,
    /// Share of publications in the citing journal-year with at least one
    /// active reference.
    pub p_i: f64,
}

impl CitationEvent {
    pub fn new(a_i: f64, r_i: u32, p_i: f64) -> Result<Self> {
        if !(a_i > 0.0 && a_i.is_finite()) {
            return Err(Error::InvalidParameter(format!("a_i must be positive, got {a_i}")));
        }
        if r_i < 1 {
            return Err(Error::InvalidParameter("r_i must be at least 1".into()));
        }
        if !(p_i > 0.0 && p_i <= 1.0) {
            return Err(Error::InvalidParameter(format!("p_i must lie in (0, 1], got {p_i}")));
        }
        Ok(CitationEvent { a_i, r_i, p_i })
    }
}

/// Citation events grouped by focal paper, file order preserved per group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CitationEvents {
    groups: BTreeMap<String, Vec<CitationEvent>>,
}

impl CitationEvents {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, focal_id: impl Into<String>, event: CitationEvent) {
        self.groups.entry(focal_id.into()).or_default().push(event);
    }

    /// Events received by `focal_id`; empty when it was never cited.
    pub fn for_paper(&self, focal_id: &str) -> &[CitationEvent] {
        self.groups.get(focal_id).map_or(&[], Vec::as_slice)
    }

    pub fn focal_ids(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Parses an events CSV (`focal_id,a_i,r_i,p_i`). A header-only or empty
/// stream yields an empty collection.
pub fn parse_citation_events<R: Read>(source: R) -> Result<CitationEvents> {
    let rows = match read_rows(source, &EVENTS_HEADER) {
        Err(Error::EmptyInput) => return Ok(CitationEvents::new()),
        other => other?,
    };
    let mut events = CitationEvents::new();
    for (line, rec) in rows {
        let a_i: f64 = parse_field(line, "a_i", &rec[1])?;
        let r_i: i64 = parse_field(line, "r_i", &rec[2])?;
        let p_i: f64 = parse_field(line, "p_i", &rec[3])?;
        let r_i = u32::try_from(r_i)
            .ok()
            .filter(|&r| r >= 1)
            .ok_or_else(|| Error::parse(line, format!("r_i must be at least 1, got {r_i}")))?;
        let event = CitationEvent::new(a_i, r_i, p_i).map_err(|e| Error::parse(line, e.to_string()))?;
        events.push(&rec[0], event);
    }
    Ok(events)
}
