//! Papers, reference cells and per-cell citation statistics.

mod events;
mod synth;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use events::{parse_citation_events, CitationEvent, CitationEvents};
pub use synth::{synthesize_corpus, Family, FieldSpec, SynthesisSpec};

pub const PAPERS_HEADER: [&str; 5] = ["paper_id", "field_id", "pub_year", "doc_type", "citations"];

/// One publication record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Paper {
    pub paper_id: String,
    pub field_id: String,
    pub pub_year: i32,
    pub doc_type: String,
    pub citations: u64,
}

/// Granularity used to group papers into reference cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CellMode {
    Field,
    FieldYear,
    #[default]
    FieldYearDocType,
}

impl CellMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CellMode::Field => "field",
            CellMode::FieldYear => "field-year",
            CellMode::FieldYearDocType => "field-year-doctype",
        }
    }
}

impl FromStr for CellMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "field" => Ok(CellMode::Field),
            "field-year" | "field+year" => Ok(CellMode::FieldYear),
            "field-year-doctype" | "field+year+doctype" => Ok(CellMode::FieldYearDocType),
            other => Err(Error::InvalidParameter(format!("unknown cell mode `{other}`"))),
        }
    }
}

/// The set of papers sharing field (and, depending on the mode, year and
/// document type).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ReferenceCell {
    pub field_id: String,
    pub pub_year: Option<i32>,
    pub doc_type: Option<String>,
}

impl ReferenceCell {
    pub fn of(paper: &Paper, mode: CellMode) -> Self {
        let (pub_year, doc_type) = match mode {
            CellMode::Field => (None, None),
            CellMode::FieldYear => (Some(paper.pub_year), None),
            CellMode::FieldYearDocType => (Some(paper.pub_year), Some(paper.doc_type.clone())),
        };
        ReferenceCell { field_id: paper.field_id.clone(), pub_year, doc_type }
    }
}

impl fmt::Display for ReferenceCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field_id)?;
        if let Some(year) = self.pub_year {
            write!(f, "/{year}")?;
        }
        if let Some(doc_type) = &self.doc_type {
            write!(f, "/{doc_type}")?;
        }
        Ok(())
    }
}

/// Immutable collection of papers partitioned into reference cells.
///
/// Papers are held in ascending `paper_id` order so that nothing downstream
/// depends on input row order.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    papers: Vec<Paper>,
    cell_mode: CellMode,
    cells: BTreeMap<ReferenceCell, Vec<usize>>,
}

impl Corpus {
    pub fn new(mut papers: Vec<Paper>, cell_mode: CellMode) -> Result<Self> {
        if papers.is_empty() {
            return Err(Error::EmptyInput);
        }
        papers.sort_by(|a, b| a.paper_id.cmp(&b.paper_id));
        for pair in papers.windows(2) {
            if pair[0].paper_id == pair[1].paper_id {
                return Err(Error::DuplicateId { id: pair[1].paper_id.clone(), line: 0 });
            }
        }
        let mut cells: BTreeMap<ReferenceCell, Vec<usize>> = BTreeMap::new();
        for (idx, paper) in papers.iter().enumerate() {
            cells.entry(ReferenceCell::of(paper, cell_mode)).or_default().push(idx);
        }
        Ok(Corpus { papers, cell_mode, cells })
    }

    /// Same papers regrouped under another cell mode.
    pub fn with_cell_mode(&self, cell_mode: CellMode) -> Corpus {
        Corpus::new(self.papers.clone(), cell_mode).expect("papers already validated")
    }

    pub fn papers(&self) -> &[Paper] {
        &self.papers
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn cell_mode(&self) -> CellMode {
        self.cell_mode
    }

    pub fn paper(&self, paper_id: &str) -> Option<&Paper> {
        self.papers.binary_search_by(|p| p.paper_id.as_str().cmp(paper_id)).ok().map(|idx| &self.papers[idx])
    }

    pub fn paper_ids(&self) -> BTreeSet<String> {
        self.papers.iter().map(|p| p.paper_id.clone()).collect()
    }

    pub fn cell_of(&self, paper: &Paper) -> ReferenceCell {
        ReferenceCell::of(paper, self.cell_mode)
    }

    /// Reference cells in ascending order with their papers.
    pub fn cells(&self) -> impl Iterator<Item = (&ReferenceCell, Vec<&Paper>)> + '_ {
        self.cells.iter().map(move |(cell, idxs)| (cell, idxs.iter().map(|&i| &self.papers[i]).collect()))
    }

    pub fn cell_keys(&self) -> impl Iterator<Item = &ReferenceCell> {
        self.cells.keys()
    }

    pub fn cell_papers(&self, cell: &ReferenceCell) -> Result<Vec<&Paper>> {
        let idxs = self.cells.get(cell).ok_or_else(|| Error::UnknownCell(cell.to_string()))?;
        Ok(idxs.iter().map(|&i| &self.papers[i]).collect())
    }

    /// Distinct field identifiers in ascending order.
    pub fn fields(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.papers.iter().map(|p| p.field_id.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Every citation count in the corpus (the pooled reference distribution).
    pub fn pooled_citations(&self) -> Vec<u64> {
        self.papers.iter().map(|p| p.citations).collect()
    }

    /// Stable 64-bit FNV-1a digest of the canonical CSV rendering.
    pub fn fingerprint(&self) -> String {
        let mut buf = Vec::new();
        write_corpus(self, &mut buf).expect("writing to a Vec cannot fail");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in buf {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

/// Summary statistics over one reference cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceSetStats {
    pub n: usize,
    /// Arithmetic mean of citations.
    pub m: f64,
    pub median: f64,
    /// Population standard deviation.
    pub sd: f64,
    /// Mean of ln(x + 1).
    pub mu_ln: f64,
    /// Population standard deviation of ln(x + 1).
    pub sigma_ln: f64,
}

impl ReferenceSetStats {
    /// Statistics over raw counts. `counts` must be nonempty.
    pub fn from_counts(counts: &[u64]) -> Self {
        assert!(!counts.is_empty(), "reference set must be nonempty");
        let n = counts.len();
        let nf = n as f64;
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let median =
            if n % 2 == 1 { sorted[n / 2] as f64 } else { (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0 };

        let m = sorted.iter().map(|&x| x as f64).sum::<f64>() / nf;
        let var = sorted.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / nf;
        let sd = if sorted[0] == sorted[n - 1] { 0.0 } else { var.sqrt() };

        let logs: Vec<f64> = sorted.iter().map(|&x| (x as f64).ln_1p()).collect();
        let mu_ln = logs.iter().sum::<f64>() / nf;
        let var_ln = logs.iter().map(|l| (l - mu_ln).powi(2)).sum::<f64>() / nf;
        let sigma_ln = if sd == 0.0 { 0.0 } else { var_ln.sqrt() };

        ReferenceSetStats { n, m, median, sd, mu_ln, sigma_ln }
    }
}

pub fn reference_stats(corpus: &Corpus, cell: &ReferenceCell) -> Result<ReferenceSetStats> {
    let counts: Vec<u64> = corpus.cell_papers(cell)?.iter().map(|p| p.citations).collect();
    Ok(ReferenceSetStats::from_counts(&counts))
}

fn check_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::parse(1, format!("expected header `{}`, found `{}`", expected.join(","), got.join(","))));
    }
    Ok(())
}

pub(crate) fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source)
}

/// Reads rows of a headered CSV, verifying the header and returning each row
/// with its 1-based line number.
pub(crate) fn read_rows<R: Read>(source: R, expected_header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>> {
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput);
    }
    check_header(&headers, expected_header)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != expected_header.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", expected_header.len(), record.len()),
            ));
        }
        rows.push((line, record));
    }
    Ok(rows)
}

pub(crate) fn parse_field<T: FromStr>(line: u64, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::parse(line, format!("invalid {name} `{raw}`")))
}

/// Parses a papers CSV (`paper_id,field_id,pub_year,doc_type,citations`).
pub fn parse_corpus<R: Read>(source: R, cell_mode: CellMode) -> Result<Corpus> {
    let rows = read_rows(source, &PAPERS_HEADER)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    let mut papers = Vec::with_capacity(rows.len());
    for (line, rec) in rows {
        let paper_id = rec[0].to_owned();
        if paper_id.is_empty() {
            return Err(Error::parse(line, "empty paper_id"));
        }
        let citations: i64 = parse_field(line, "citations", &rec[4])?;
        if citations < 0 {
            return Err(Error::parse(line, format!("negative citations {citations}")));
        }
        if !seen.insert(paper_id.clone()) {
            return Err(Error::DuplicateId { id: paper_id, line });
        }
        papers.push(Paper {
            paper_id,
            field_id: rec[1].to_owned(),
            pub_year: parse_field(line, "pub_year", &rec[2])?,
            doc_type: rec[3].to_owned(),
            citations: citations as u64,
        });
    }
    Corpus::new(papers, cell_mode)
}

/// Writes the corpus as papers CSV, rows in `paper_id` order.
pub fn write_corpus<W: Write>(corpus: &Corpus, sink: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    writer.write_record(PAPERS_HEADER)?;
    for p in corpus.papers() {
        writer.write_record([
            p.paper_id.as_str(),
            p.field_id.as_str(),
            &p.pub_year.to_string(),
            p.doc_type.as_str(),
            &p.citations.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// (citation count, number of papers) rows of the 52-paper demonstration set.
pub const TABLE1_ROWS: [(u64, usize); 22] = [
    (0, 9),
    (1, 8),
    (2, 6),
    (3, 4),
    (4, 4),
    (5, 2),
    (6, 2),
    (7, 1),
    (8, 1),
    (9, 1),
    (10, 2),
    (12, 1),
    (15, 1),
    (16, 1),
    (20, 2),
    (25, 1),
    (38, 1),
    (42, 1),
    (43, 1),
    (80, 1),
    (120, 1),
    (200, 1),
];

/// The 52-paper single-cell demonstration corpus.
pub fn table1_fixture() -> Corpus {
    let mut papers = Vec::with_capacity(52);
    let mut next = 1;
    for &(citations, count) in TABLE1_ROWS.iter() {
        for _ in 0..count {
            papers.push(Paper {
                paper_id: format!("T1-{next:02}"),
                field_id: "F".into(),
                pub_year: 2020,
                doc_type: "article".into(),
                citations,
            });
            next += 1;
        }
    }
    Corpus::new(papers, CellMode::default()).expect("fixture is valid")
}
