//! Group-per-line p-value files: `group_id,p1,p2,...`, ragged rows, optional
//! header recognised by a non-numeric second field.

use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use anyhow::{Context, Result};
use csv::{ReaderBuilder, StringRecord, StringRecordsIntoIter, Trim};
use tailcomb::combine::PValueVector;
use tailcomb::PValues;

use crate::failure::Failure;

pub fn open(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(|e| Failure::Config.wrap(e))?;
    Ok(Box::new(BufReader::new(file)))
}

#[derive(Debug)]
pub struct Group {
    pub id: String,
    pub line: u64,
    pub p: PValues,
}

/// Streams groups one record at a time.
pub struct GroupReader<R> {
    records: StringRecordsIntoIter<R>,
    header: Option<StringRecord>,
    started: bool,
    /// Column holding the value for single-value files, when a header names it.
    value_column: Option<usize>,
    peeked: Option<csv::Result<StringRecord>>,
}

fn line_of(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn is_header(record: &StringRecord) -> bool {
    record.get(1).is_some_and(|f| f.parse::<f64>().is_err())
}

impl<R: Read> GroupReader<R> {
    pub fn new(reader: R) -> Self {
        let records = ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(Trim::All)
            .from_reader(reader)
            .into_records();
        GroupReader {
            records,
            header: None,
            started: false,
            value_column: None,
            peeked: None,
        }
    }

    fn start(&mut self) {
        if self.started {
            return;
        }
        self.started = true;
        match self.records.next() {
            Some(Ok(first)) if is_header(&first) => self.header = Some(first),
            other => self.peeked = other,
        }
    }

    /// Switches to one-value-per-row mode, reading `column` when the header
    /// names it.
    pub fn single_value(mut self, column: &str) -> Self {
        self.start();
        self.value_column = self
            .header
            .as_ref()
            .and_then(|h| h.iter().position(|f| f == column));
        self
    }

    fn parse(&self, record: StringRecord) -> Result<Group> {
        let line = line_of(&record);
        let id = record.get(0).unwrap_or_default().to_string();
        let fields: Vec<&str> = match self.value_column {
            Some(c) => record.get(c).into_iter().collect(),
            None => record.iter().skip(1).filter(|f| !f.is_empty()).collect(),
        };
        if fields.is_empty() {
            return Err(
                Failure::Validation.msg(format!("line {line}: group {id:?} has no p-values"))
            );
        }
        let values = fields
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Failure::Validation.msg(format!("line {line}: {f:?} is not a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let p = PValueVector::new(values)
            .map_err(|e| Failure::Validation.msg(format!("line {line}: {e}")))?;
        Ok(Group { id, line, p })
    }
}

impl<R: Read> Iterator for GroupReader<R> {
    type Item = Result<Group>;

    fn next(&mut self) -> Option<Self::Item> {
        self.start();
        let record = self.peeked.take().or_else(|| self.records.next())?;
        Some(match record {
            Ok(r) => self.parse(r),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                Err(Failure::Validation.msg(format!("line {line}: {e}")))
            }
        })
    }
}
