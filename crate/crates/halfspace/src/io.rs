//! CSV datasets and JSON model files.
//!
//! Dataset rows are `x₁,…,x_d,label`, comma separated, with an optional
//! header line. Labels may be -1/+1 or 0/1; 0 is read as -1. Written files
//! always use -1/1.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use halfspace_core::{Dataset, Label, LabeledExample};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },

    #[error("line {line}: expected {expected} feature columns, found {found}")]
    InconsistentDimension { line: u64, expected: usize, found: usize },

    #[error("line {line}: non-finite feature value")]
    NonFinite { line: u64 },

    #[error("line {line}: label {value} is not one of -1, +1, 0, 1")]
    InvalidLabel { line: u64, value: String },

    #[error("dataset file contains no rows")]
    Empty,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Skip the first line.
    pub header: bool,
}

pub fn load_dataset(path: impl AsRef<Path>, opts: CsvOptions) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io { path: path.to_owned(), source })?;
    read_dataset(file, opts).map_err(|e| match e {
        DatasetError::Io { source, .. } => DatasetError::Io { path: path.to_owned(), source },
        other => other,
    })
}

pub fn read_dataset<R: Read>(reader: R, opts: CsvOptions) -> Result<Dataset, DatasetError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut examples = Vec::new();
    let mut dim: Option<usize> = None;
    let mut record = csv::StringRecord::new();
    loop {
        let more = csv.read_record(&mut record).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => DatasetError::Io {
                path: PathBuf::new(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => DatasetError::Malformed {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            },
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() < 2 {
            return Err(DatasetError::Malformed {
                line,
                reason: "need at least one feature and a label".into(),
            });
        }
        let features = record.len() - 1;
        match dim {
            None => dim = Some(features),
            Some(expected) if expected != features => {
                return Err(DatasetError::InconsistentDimension { line, expected, found: features });
            }
            Some(_) => {}
        }
        let mut x = Vec::with_capacity(features);
        for field in record.iter().take(features) {
            let value: f64 = field.parse().map_err(|_| DatasetError::Malformed {
                line,
                reason: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFinite { line });
            }
            x.push(value);
        }
        let raw = &record[features];
        let y = raw
            .parse::<f64>()
            .ok()
            .and_then(|v| Label::from_value(v).ok())
            .ok_or_else(|| DatasetError::InvalidLabel { line, value: raw.to_owned() })?;
        examples.push(LabeledExample { x, y });
    }
    if examples.is_empty() {
        return Err(DatasetError::Empty);
    }
    Dataset::new(examples).map_err(|e| DatasetError::Malformed { line: 0, reason: e.to_string() })
}

/// Writes `data` in the format [`read_dataset`] reads, without a header.
/// Floats use the shortest representation that round-trips.
pub fn write_dataset<W: Write>(data: &Dataset, writer: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(writer);
    for e in data.iter() {
        for v in &e.x {
            write!(out, "{v},")?;
        }
        writeln!(out, "{}", i8::from(e.y))?;
    }
    out.flush()
}

pub fn save_dataset(data: &Dataset, path: impl AsRef<Path>) -> std::io::Result<()> {
    write_dataset(data, File::create(path)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> std::io::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(std::io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, DatasetError> {
        read_dataset(text.as_bytes(), CsvOptions::default())
    }

    #[test]
    fn parses_signed_labels() {
        let data = parse("1.0,2.0,+1\n0.0,-1.0,-1\n").unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.examples()[0].y, Label::Positive);
        assert_eq!(data.examples()[1].y, Label::Negative);
    }

    #[test]
    fn nan_is_rejected_with_its_line() {
        match parse("1.0,NaN,+1\n") {
            Err(DatasetError::NonFinite { line }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_one_labels_are_remapped() {
        let data = parse("0.1,0\n0.2,1\n0.3,0\n0.4,1\n0.5,1\n").unwrap();
        assert_eq!(data.len(), 5);
        assert_eq!(data.count_label(Label::Negative), 2);
        assert_eq!(data.count_label(Label::Positive), 3);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse(""), Err(DatasetError::Empty)));
        assert!(matches!(
            parse("1,2,1\n1,1\n"),
            Err(DatasetError::InconsistentDimension { line: 2, expected: 2, found: 1 })
        ));
        assert!(matches!(parse("1,abc,1\n"), Err(DatasetError::Malformed { line: 1, .. })));
        assert!(matches!(parse("1,2,3\n"), Err(DatasetError::InvalidLabel { line: 1, .. })));
        assert!(matches!(parse("1\n"), Err(DatasetError::Malformed { line: 1, .. })));
    }

    #[test]
    fn header_is_skipped_on_request() {
        let text = "a,b,label\n1,2,1\n";
        assert!(parse(text).is_err());
        let data = read_dataset(text.as_bytes(), CsvOptions { header: true }).unwrap();
        assert_eq!(data.len(), 1);
    }
}
