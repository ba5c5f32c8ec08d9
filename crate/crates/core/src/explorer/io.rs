use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use super::hunt::SearchResult;
use super::sweep::{FailureRecord, Record, ReportSet, Summary};
use crate::error::{Error, Result};
use crate::suite::{ChainReport, LemmaReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Contents of a report file.
#[derive(Clone, Debug, PartialEq)]
pub enum ReportFile {
    Reports(ReportSet),
    Search(SearchResult),
}

impl From<ReportSet> for ReportFile {
    fn from(rs: ReportSet) -> Self {
        ReportFile::Reports(rs)
    }
}

impl From<SearchResult> for ReportFile {
    fn from(sr: SearchResult) -> Self {
        ReportFile::Search(sr)
    }
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
enum LineRef<'a> {
    Chain(&'a ChainReport),
    Lemma(&'a LemmaReport),
    Failure(&'a FailureRecord),
    Summary(&'a Summary),
    Search(&'a SearchResult),
}

#[derive(Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
enum Line {
    Chain(ChainReport),
    Lemma(LemmaReport),
    Failure(FailureRecord),
    Summary(Summary),
    Search(SearchResult),
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    #[serde(flatten)]
    line: LineRef<'a>,
}

/// Writes floats as `d.dddddddddddddddde±x`: 17 significant digits.
struct Scientific;

impl Formatter for Scientific {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn write_line(out: &mut impl Write, line: LineRef<'_>) -> Result<()> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        line,
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut *out, Scientific);
    env.serialize(&mut ser)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Serializes to newline-delimited JSON: one line per record followed by a
/// summary line, or a single search line.
pub fn to_jsonl(content: &ReportFile, out: &mut impl Write) -> Result<()> {
    match content {
        ReportFile::Reports(rs) => {
            for rec in &rs.records {
                let line = match rec {
                    Record::Chain(c) => LineRef::Chain(c),
                    Record::Lemma(l) => LineRef::Lemma(l),
                    Record::Failure(f) => LineRef::Failure(f),
                };
                write_line(out, line)?;
            }
            write_line(out, LineRef::Summary(&rs.summary))
        }
        ReportFile::Search(sr) => write_line(out, LineRef::Search(sr)),
    }
}

pub fn write_reports(content: &ReportFile, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    to_jsonl(content, &mut out)?;
    out.flush()?;
    Ok(())
}

fn parse_line(text: &str) -> Result<Line> {
    let mut value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::MalformedReport("line is not a JSON object".into()))?;
    let version = obj
        .remove("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::MalformedReport("missing schema_version".into()))?;
    if version != u64::from(SCHEMA_VERSION) {
        return Err(Error::SchemaVersionMismatch {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: SCHEMA_VERSION,
        });
    }
    Ok(serde_json::from_value(value)?)
}

pub fn from_jsonl(input: impl BufRead) -> Result<ReportFile> {
    let mut records = Vec::new();
    let mut summary = None;
    let mut search = None;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if summary.is_some() || search.is_some() {
            return Err(Error::MalformedReport(format!(
                "line {} follows the closing line",
                i + 1
            )));
        }
        match parse_line(&line)? {
            Line::Chain(c) => records.push(Record::Chain(c)),
            Line::Lemma(l) => records.push(Record::Lemma(l)),
            Line::Failure(f) => records.push(Record::Failure(f)),
            Line::Summary(s) => summary = Some(s),
            Line::Search(s) if records.is_empty() => search = Some(s),
            Line::Search(_) => return Err(Error::MalformedReport("search result mixed with records".into())),
        }
    }
    match (summary, search) {
        (Some(summary), None) => Ok(ReportFile::Reports(ReportSet { records, summary })),
        (None, Some(search)) => Ok(ReportFile::Search(search)),
        _ => Err(Error::MalformedReport("no summary or search line".into())),
    }
}

pub fn read_reports(path: impl AsRef<Path>) -> Result<ReportFile> {
    from_jsonl(BufReader::new(File::open(path)?))
}

/// One row per (target, norm class).
pub fn write_summary_csv(summary: &Summary, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in &summary.rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedReport(format!("{other:?}")),
    }
}
