//! `fieldnorm` command line.
//!
//! Exit codes: 0 success, 2 aggregation refused, 64 usage error, 65 data
//! error, 74 I/O error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::citing_side::{sncs, sncs3_percentile, SncsVariant};
use crate::corpus::{
    parse_citation_events, parse_corpus, synthesize_corpus, table1_fixture, write_corpus, CellMode, Corpus,
    SynthesisSpec, TABLE1_ROWS,
};
use crate::error::Error;
use crate::fairness::{distribution_coincidence, top_z_share};
use crate::linearity::{classify_linearity, guarded_aggregate, misuse_demo, Statistic};
use crate::normalizers::{
    self, parse_rcr_inputs, parse_scores, percentile_rank, round2, write_scores, ExchangeRateMode, ExchangeRateParams,
    Linearity, Method, PercentileMode, ScoreSet,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REFUSED: u8 = 2;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_IO: u8 = 74;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subcommand {
    Normalize,
    Classify,
    Aggregate,
    Fairness,
    DemoMisuse,
    Generate,
    Table1,
}

#[derive(Debug, Parser)]
#[command(name = "fieldnorm", version, about = "Field normalization of citation counts")]
struct RunConfig {
    #[arg(value_enum)]
    command: Subcommand,
    /// Papers CSV (scores CSV for `aggregate`, RCR inputs for `--method rcr`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Citation events CSV for the citing-side methods.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    method: Option<String>,
    /// cp-in|cp-ex for percentile, original|redefined for exchange-rate, 1|2|3 for sncs.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, default_value = "field-year-doctype")]
    cell: String,
    #[arg(long, default_value_t = crate::linearity::DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value_t = 10.0)]
    z: f64,
    #[arg(long = "n-intervals", default_value_t = 1000)]
    n_intervals: usize,
    #[arg(long = "pi-m", default_value_t = 706)]
    pi_m: usize,
    #[arg(long = "pi-M", default_value_t = 998)]
    pi_max: usize,
    /// File of paper ids, one per line.
    #[arg(long)]
    group: Option<PathBuf>,
    #[arg(long, default_value = "sum")]
    stat: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Synthesis spec JSON for `generate`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Permit aggregating citing-side (SNCS) scores.
    #[arg(long)]
    acknowledge_outside_category: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(e) if e.is_refusal() => EXIT_REFUSED,
            CliError::Lib(Error::InvalidParameter(_)) => EXIT_USAGE,
            CliError::Lib(Error::Io(_)) => EXIT_IO,
            CliError::Lib(_) => EXIT_DATA,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&config) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            match &err {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Lib(e) if e.is_refusal() => eprintln!("{e}"),
                CliError::Lib(e) => eprintln!("error: {e}"),
            }
            err.exit_code()
        }
    }
}

fn execute(cfg: &RunConfig) -> CliResult<()> {
    for path in [&cfg.input, &cfg.events, &cfg.group, &cfg.spec].into_iter().flatten() {
        if !path.is_file() {
            return Err(CliError::Usage(format!("no such file: {}", path.display())));
        }
    }
    match cfg.command {
        Subcommand::Normalize => cmd_normalize(cfg),
        Subcommand::Classify => cmd_classify(cfg),
        Subcommand::Aggregate => cmd_aggregate(cfg),
        Subcommand::Fairness => cmd_fairness(cfg),
        Subcommand::DemoMisuse => cmd_demo(cfg),
        Subcommand::Generate => cmd_generate(cfg),
        Subcommand::Table1 => cmd_table1(cfg),
    }
}

fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    value.as_deref().ok_or_else(|| CliError::Usage(format!("{flag} is required")))
}

fn read_corpus(cfg: &RunConfig) -> CliResult<Corpus> {
    let mode: CellMode = cfg.cell.parse()?;
    let path = require(&cfg.input, "--input")?;
    Ok(parse_corpus(BufReader::new(File::open(path)?), mode)?)
}

/// Resolves `--method` (and `--mode`) to a concrete method.
fn resolve_method(cfg: &RunConfig) -> CliResult<Method> {
    let name = cfg.method.as_deref().ok_or_else(|| CliError::Usage("--method is required".into()))?;
    let mode = cfg.mode.as_deref();
    let method = match name {
        "percentile" => match mode.unwrap_or("cp-in").parse::<PercentileMode>()? {
            PercentileMode::CpIn => Method::PercentileCpIn,
            PercentileMode::CpEx => Method::PercentileCpEx,
        },
        "exchange-rate" => {
            let mode = mode.ok_or_else(|| CliError::Usage("exchange-rate needs --mode original|redefined".into()))?;
            match mode.parse::<ExchangeRateMode>()? {
                ExchangeRateMode::Original => Method::ExchangeRateOriginal,
                ExchangeRateMode::Redefined => Method::ExchangeRateRedefined,
            }
        }
        "sncs" => match mode {
            Some("1") => Method::Sncs1,
            Some("2") => Method::Sncs2,
            Some("3") => Method::Sncs3,
            _ => return Err(CliError::Usage("sncs needs --mode 1|2|3".into())),
        },
        other => other.parse().map_err(|_| CliError::Usage(format!("unknown method `{other}`")))?,
    };
    Ok(method)
}

fn announce(method: Method) {
    eprintln!("method: {method}   linearity class: {}", method.linearity().as_str().to_uppercase());
}

/// Computes the score set; returns the corpus too when the method is
/// cell-based.
fn compute_scores(cfg: &RunConfig, method: Method) -> CliResult<(ScoreSet, Option<Corpus>)> {
    use Method::*;
    match method {
        Rcr => {
            let path = require(&cfg.input, "--input")?;
            let inputs = parse_rcr_inputs(BufReader::new(File::open(path)?))?;
            let (_, set) = normalizers::rcr(&inputs)?;
            Ok((set, None))
        }
        Sncs1 | Sncs2 | Sncs3 | Sncs3Percentile => {
            let path = require(&cfg.events, "--events")?;
            let events = parse_citation_events(BufReader::new(File::open(path)?))?;
            let corpus = match &cfg.input {
                Some(_) => Some(read_corpus(cfg)?),
                None => None,
            };
            let universe: BTreeSet<String> = match &corpus {
                Some(c) => c.paper_ids(),
                None => events.focal_ids().map(str::to_owned).collect(),
            };
            let set = match method {
                Sncs1 => sncs(&events, SncsVariant::One, &universe)?,
                Sncs2 => sncs(&events, SncsVariant::Two, &universe)?,
                Sncs3 => sncs(&events, SncsVariant::Three, &universe)?,
                _ => sncs3_percentile(&events, &universe)?,
            };
            Ok((set, corpus))
        }
        _ => {
            let corpus = read_corpus(cfg)?;
            let set = cell_method(&corpus, method, cfg)?;
            Ok((set, Some(corpus)))
        }
    }
}

fn cell_method(corpus: &Corpus, method: Method, cfg: &RunConfig) -> CliResult<ScoreSet> {
    let exchange = ExchangeRateParams {
        mode: ExchangeRateMode::Redefined,
        n_intervals: cfg.n_intervals,
        pi_m: cfg.pi_m,
        pi_max: cfg.pi_max,
    };
    Ok(normalizers::normalize_corpus(corpus, method, &exchange)?)
}

/// Writes `name` under the output directory, or to stdout when there is none.
fn emit<F>(cfg: &RunConfig, name: &str, to_stdout: bool, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> crate::Result<()>,
{
    match &cfg.output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut file = BufWriter::new(File::create(dir.join(name))?);
            write(&mut file)?;
            file.flush()?;
        }
        None if to_stdout => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
        }
        None => {}
    }
    Ok(())
}

fn cmd_normalize(cfg: &RunConfig) -> CliResult<()> {
    let method = resolve_method(cfg)?;
    announce(method);
    let (set, _) = compute_scores(cfg, method)?;
    emit(cfg, "scores.csv", true, |w| write_scores(&set, w))
}

fn cmd_classify(cfg: &RunConfig) -> CliResult<()> {
    let method = resolve_method(cfg)?;
    announce(method);
    let (set, corpus) = compute_scores(cfg, method)?;
    let corpus =
        corpus.ok_or_else(|| CliError::Usage(format!("classify needs a papers corpus (--input) for `{method}`")))?;
    let report = classify_linearity(&set, &corpus, cfg.tolerance)?;
    eprintln!("observed verdict: {}", report.overall().as_str().to_uppercase());
    emit(cfg, "classification.csv", true, |w| report.write_csv(w))?;
    emit(cfg, "mapping.csv", false, |w| report.write_mapping_csv(w))
}

fn read_group(path: &Path) -> CliResult<Vec<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && *l != "paper_id")
        .map(str::to_owned)
        .collect())
}

fn cmd_aggregate(cfg: &RunConfig) -> CliResult<()> {
    let stat: Statistic = cfg.stat.parse()?;
    let path = require(&cfg.input, "--input")?;
    let set = parse_scores(BufReader::new(File::open(path)?))?;
    announce(set.method.method);
    let group = match &cfg.group {
        Some(path) => read_group(path)?,
        None => set.scores.keys().cloned().collect(),
    };
    if set.linearity() == Linearity::OutsideCategory && !cfg.acknowledge_outside_category {
        return Err(CliError::Lib(Error::Refused {
            method: set.method.method.as_str().into(),
            linearity: set.linearity().as_str().into(),
            reason: "scores fall outside the linear/nonlinear taxonomy; pass --acknowledge-outside-category \
                     to aggregate additive citing-side scores"
                .into(),
        }));
    }
    let result = guarded_aggregate(&set, &group, stat)?;
    if let Some(note) = &result.advisory {
        eprintln!("advisory: {note}");
    }
    println!("{}\t{}\tn={}", cfg.stat, result.value, result.group_size);
    emit(cfg, "aggregate.json", false, |w| {
        serde_json::to_writer_pretty(&mut *w, &result)?;
        writeln!(w)?;
        Ok(())
    })
}

fn cmd_fairness(cfg: &RunConfig) -> CliResult<()> {
    let method = resolve_method(cfg)?;
    announce(method);
    let (set, corpus) = compute_scores(cfg, method)?;
    let corpus = corpus.ok_or_else(|| CliError::Usage("fairness needs a papers corpus (--input)".into()))?;
    let report = top_z_share(&set, &corpus, cfg.z)?;
    let coincidence = match distribution_coincidence(&set, &corpus) {
        Ok(c) => Some(c),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e.into()),
    };
    emit(cfg, "fairness.csv", true, |w| report.write_csv(w))?;
    let summary = serde_json::json!({
        "method": method.as_str(),
        "linearity_class": method.linearity().as_str(),
        "z": report.z,
        "n_papers": report.n_papers,
        "slots": report.slots,
        "max_abs_deviation": report.max_abs_deviation,
        "ks_max_distance": coincidence.as_ref().map(|c| c.max_distance),
        "fields": report.fields,
    });
    emit(cfg, "fairness.json", false, |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)?;
        Ok(())
    })?;
    if let Some(c) = &coincidence {
        eprintln!("max KS distance between fields: {}", c.max_distance);
        emit(cfg, "cdf.csv", false, |w| c.write_csv(w))?;
    }
    Ok(())
}

fn cmd_demo(cfg: &RunConfig) -> CliResult<()> {
    let report = misuse_demo(&table1_fixture())?;
    eprintln!("method: percentile-cp-in   linearity class: NONLINEAR");
    print!("{report}");
    emit(cfg, "demo.txt", false, |w| Ok(write!(w, "{report}")?))?;
    emit(cfg, "demo.json", false, |w| Ok(writeln!(w, "{}", report.to_json()?)?))
}

fn cmd_generate(cfg: &RunConfig) -> CliResult<()> {
    let mut spec = match &cfg.spec {
        Some(path) => SynthesisSpec::from_json(&fs::read_to_string(path)?)?,
        None => SynthesisSpec::default_three_field(0, 1000),
    };
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    let corpus = synthesize_corpus(&spec)?;
    eprintln!("generated {} papers in {} fields (seed {})", corpus.len(), spec.fields.len(), spec.seed);
    emit(cfg, "papers.csv", true, |w| write_corpus(&corpus, w))
}

fn write_golden(w: &mut dyn Write) -> crate::Result<()> {
    let corpus = table1_fixture();
    let mean = normalizers::mean_based(&corpus)?;
    let pct = percentile_rank(&corpus, PercentileMode::CpIn)?;
    let k = mean.maps.values().next().expect("one cell").k;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["citations", "n_papers", "k", "m_score", "rank", "percentile"])?;
    let mut rank = 0;
    for &(c, n) in TABLE1_ROWS.iter() {
        rank += n;
        let paper = corpus.papers().iter().find(|p| p.citations == c).expect("row present");
        out.write_record([
            c.to_string(),
            n.to_string(),
            format!("{:.2}", round2(k)),
            format!("{:.2}", round2(mean.scores[&paper.paper_id])),
            rank.to_string(),
            format!("{:.2}", round2(pct.scores[&paper.paper_id])),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_table1(cfg: &RunConfig) -> CliResult<()> {
    let corpus = table1_fixture();
    emit(cfg, "papers.csv", false, |w| write_corpus(&corpus, w))?;
    emit(cfg, "table1_golden.csv", true, write_golden)
}
