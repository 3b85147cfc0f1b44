use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::kl::UnitValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossFormat {
    /// Header row `loss`, one value per line.
    Csv,
    /// One JSON object per line with a numeric `loss` key.
    Jsonl,
    /// One value per line, no header.
    Plain,
}

impl FromStr for LossFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(LossFormat::Csv),
            "jsonl" => Ok(LossFormat::Jsonl),
            "plain" => Ok(LossFormat::Plain),
            other => Err(format!("unknown format `{other}` (expected csv, jsonl or plain)")),
        }
    }
}

impl fmt::Display for LossFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossFormat::Csv => "csv",
            LossFormat::Jsonl => "jsonl",
            LossFormat::Plain => "plain",
        })
    }
}

/// Loss of the hypothesis on one held-out example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub index: u64,
    pub loss: UnitValue,
}

/// Ingested losses in file order, plus the SHA-256 of the raw input bytes.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSet {
    pub records: Vec<LossRecord>,
    pub digest: String,
}

impl LossSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sum of losses, accumulated in file order.
    pub fn sum(&self) -> f64 {
        self.records.iter().map(|r| r.loss.get()).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read input: {0}")]
    Io(#[from] io::Error),
    #[error("line 1: expected header `loss`, found `{found}`")]
    Header { found: String },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: loss is NaN")]
    NotANumber { line: u64 },
    #[error("line {line}: loss #{index} = {value} is outside [0, 1]")]
    OutOfRange { index: u64, line: u64, value: f64 },
    #[error("input contains no losses")]
    Empty,
}

impl IngestError {
    pub fn is_io(&self) -> bool {
        matches!(self, IngestError::Io(_))
    }
}

/// Feeds every byte read through it into a SHA-256 hasher.
struct HashingReader<R> {
    inner: R,
    hasher: Sha256,
}

impl<R: Read> Read for HashingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let read = self.inner.read(buf)?;
        self.hasher.update(&buf[..read]);
        Ok(read)
    }
}

/// Reads a loss file. See [`ingest_reader`].
pub fn ingest(path: impl AsRef<Path>, format: LossFormat) -> Result<LossSet, IngestError> {
    ingest_reader(File::open(path)?, format)
}

/// Parses losses from `reader`, streaming; only the parsed values are kept.
///
/// Values are validated strictly: NaN is rejected, and anything outside
/// `[0, 1]` fails with the first offending index rather than being clamped.
pub fn ingest_reader(reader: impl Read, format: LossFormat) -> Result<LossSet, IngestError> {
    let mut hashing = HashingReader {
        inner: reader,
        hasher: Sha256::new(),
    };
    let mut records = Vec::new();
    match format {
        LossFormat::Csv => read_csv(&mut hashing, &mut records)?,
        LossFormat::Jsonl => read_lines(&mut hashing, &mut records, parse_jsonl_line)?,
        LossFormat::Plain => read_lines(&mut hashing, &mut records, parse_plain_line)?,
    }
    // Drain anything a parser left unread so the digest covers the file.
    io::copy(&mut hashing, &mut io::sink())?;
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(LossSet {
        records,
        digest: hex::encode(hashing.hasher.finalize()),
    })
}

fn push_loss(records: &mut Vec<LossRecord>, line: u64, value: f64) -> Result<(), IngestError> {
    if value.is_nan() {
        return Err(IngestError::NotANumber { line });
    }
    let index = records.len() as u64;
    let loss = UnitValue::new(value).map_err(|_| IngestError::OutOfRange { index, line, value })?;
    records.push(LossRecord { index, loss });
    Ok(())
}

fn parse_number(text: &str, line: u64) -> Result<f64, IngestError> {
    text.trim().parse::<f64>().map_err(|_| IngestError::Parse {
        line,
        message: format!("`{}` is not a decimal number", text.trim()),
    })
}

fn read_csv(reader: impl Read, records: &mut Vec<LossRecord>) -> Result<(), IngestError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = csv.headers().map_err(csv_error)?;
    if header.is_empty() {
        return Ok(());
    }
    if header.len() != 1 || &header[0] != "loss" {
        return Err(IngestError::Header {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    for row in csv.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let value = parse_number(&row[0], line)?;
        push_loss(records, line, value)?;
    }
    Ok(())
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        kind => IngestError::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn parse_jsonl_line(text: &str, line: u64) -> Result<f64, IngestError> {
    let fail = |message: String| IngestError::Parse { line, message };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| fail(e.to_string()))?;
    let object = value
        .as_object()
        .ok_or_else(|| fail("expected a JSON object".into()))?;
    match object.get("loss") {
        Some(serde_json::Value::Number(n)) => n
            .as_f64()
            .ok_or_else(|| fail(format!("`loss` value {n} is not representable"))),
        Some(other) => Err(fail(format!("`loss` must be a number, found {other}"))),
        None => Err(fail("missing required key `loss`".into())),
    }
}

fn parse_plain_line(text: &str, line: u64) -> Result<f64, IngestError> {
    parse_number(text, line)
}

/// Line-oriented formats. Blank lines are tolerated only at the end.
fn read_lines(
    reader: impl Read,
    records: &mut Vec<LossRecord>,
    parse: fn(&str, u64) -> Result<f64, IngestError>,
) -> Result<(), IngestError> {
    let mut first_blank: Option<u64> = None;
    for (i, text) in BufReader::new(reader).lines().enumerate() {
        let text = text?;
        let line = i as u64 + 1;
        if text.trim().is_empty() {
            first_blank.get_or_insert(line);
            continue;
        }
        if let Some(blank) = first_blank {
            return Err(IngestError::Parse {
                line: blank,
                message: "blank line before end of input".into(),
            });
        }
        let value = parse(&text, line)?;
        push_loss(records, line, value)?;
    }
    Ok(())
}
