//! Sampled trajectories and their CSV/JSON encodings.
//!
//! Both encodings flatten complex fields into `<name>.re` and `<name>.im`.
//! CSV has a `t,<field>...` header and writes every number with 17
//! significant digits; JSON is an array of per-sample objects with the same
//! keys. Either form reads back to bit-identical values.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value as Json};
use thiserror::Error;

use crate::operator::{c, C64};

#[derive(Debug, Error)]
pub enum TimeSeriesError {
    #[error("sample time {t} does not increase past {last}")]
    NonIncreasingTime { t: f64, last: f64 },
    #[error("sample does not match the declared fields: {0}")]
    FieldMismatch(String),
    #[error("value of `{0}` is not finite")]
    NonFinite(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sample {
    Real(f64),
    Complex(C64),
}

impl Sample {
    fn kind(&self) -> FieldKind {
        match self {
            Sample::Real(_) => FieldKind::Real,
            Sample::Complex(_) => FieldKind::Complex,
        }
    }
}

/// Times plus one record per time; every record carries the same fields.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    fields: Vec<(String, FieldKind)>,
    times: Vec<f64>,
    records: Vec<Vec<Sample>>,
}

impl TimeSeries {
    pub fn new(fields: Vec<(String, FieldKind)>) -> Self {
        TimeSeries { fields, times: Vec::new(), records: Vec::new() }
    }

    pub fn push(&mut self, t: f64, record: Vec<Sample>) -> Result<(), TimeSeriesError> {
        if let Some(&last) = self.times.last() {
            if t.partial_cmp(&last) != Some(std::cmp::Ordering::Greater) {
                return Err(TimeSeriesError::NonIncreasingTime { t, last });
            }
        }
        if record.len() != self.fields.len() || record.iter().zip(&self.fields).any(|(s, (_, k))| s.kind() != *k) {
            return Err(TimeSeriesError::FieldMismatch(format!(
                "{} values for {} fields",
                record.len(),
                self.fields.len()
            )));
        }
        self.times.push(t);
        self.records.push(record);
        Ok(())
    }

    pub fn fields(&self) -> &[(String, FieldKind)] {
        &self.fields
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn record(&self, i: usize) -> &[Sample] {
        &self.records[i]
    }

    /// Values of one field across all samples.
    pub fn column(&self, name: &str) -> Option<Vec<Sample>> {
        let idx = self.fields.iter().position(|(n, _)| n == name)?;
        Some(self.records.iter().map(|r| r[idx]).collect())
    }

    pub fn real_column(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?
            .into_iter()
            .map(|s| match s {
                Sample::Real(x) => Some(x),
                Sample::Complex(_) => None,
            })
            .collect()
    }

    pub fn complex_column(&self, name: &str) -> Option<Vec<C64>> {
        self.column(name)?
            .into_iter()
            .map(|s| match s {
                Sample::Complex(z) => Some(z),
                Sample::Real(_) => None,
            })
            .collect()
    }

    /// `t` followed by the flattened field names.
    pub fn flat_header(&self) -> Vec<String> {
        let mut header = vec!["t".to_string()];
        for (name, kind) in &self.fields {
            match kind {
                FieldKind::Real => header.push(name.clone()),
                FieldKind::Complex => {
                    header.push(format!("{name}.re"));
                    header.push(format!("{name}.im"));
                }
            }
        }
        header
    }

    fn flat_row(&self, i: usize) -> Vec<f64> {
        let mut row = vec![self.times[i]];
        for s in &self.records[i] {
            match *s {
                Sample::Real(x) => row.push(x),
                Sample::Complex(z) => {
                    row.push(z.re);
                    row.push(z.im);
                }
            }
        }
        row
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TimeSeriesError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.flat_header()).map_err(csv_error)?;
        for i in 0..self.len() {
            out.write_record(self.flat_row(i).iter().map(|x| format!("{x:.16e}"))).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), TimeSeriesError> {
        let header = self.flat_header();
        let mut rows = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut obj = Map::new();
            for (key, x) in header.iter().zip(self.flat_row(i)) {
                let num = Number::from_f64(x).ok_or_else(|| TimeSeriesError::NonFinite(key.clone()))?;
                obj.insert(key.clone(), Json::Number(num));
            }
            rows.push(Json::Object(obj));
        }
        serde_json::to_writer_pretty(&mut w, &Json::Array(rows)).map_err(|e| TimeSeriesError::Parse(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn to_json_string(&self) -> Result<String, TimeSeriesError> {
        let mut buf = Vec::new();
        self.write_json(&mut buf)?;
        Ok(String::from_utf8(buf).expect("UTF-8 output"))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, TimeSeriesError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_error)?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| TimeSeriesError::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Self::from_flat(&header, rows)
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, TimeSeriesError> {
        let parsed: Vec<Map<String, Json>> =
            serde_json::from_reader(r).map_err(|e| TimeSeriesError::Parse(e.to_string()))?;
        let header: Vec<String> =
            parsed.first().map(|o| o.keys().cloned().collect()).unwrap_or_else(|| vec!["t".into()]);
        let mut rows = Vec::new();
        for obj in &parsed {
            let row = header
                .iter()
                .map(|k| {
                    obj.get(k).and_then(Json::as_f64).ok_or_else(|| TimeSeriesError::Parse(format!("missing `{k}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if obj.len() != header.len() {
                return Err(TimeSeriesError::Parse("samples have differing keys".into()));
            }
            rows.push(row);
        }
        Self::from_flat(&header, rows)
    }

    fn from_flat(header: &[String], rows: Vec<Vec<f64>>) -> Result<Self, TimeSeriesError> {
        if header.first().map(String::as_str) != Some("t") {
            return Err(TimeSeriesError::Parse("first column must be `t`".into()));
        }
        // Pair `<name>.re` with a following `<name>.im`.
        let mut fields = Vec::new();
        let mut layout = Vec::new();
        let mut k = 1;
        while k < header.len() {
            let name = &header[k];
            let pair = name.strip_suffix(".re").filter(|base| header.get(k + 1) == Some(&format!("{base}.im")));
            match pair {
                Some(base) => {
                    fields.push((base.to_string(), FieldKind::Complex));
                    layout.push((k, true));
                    k += 2;
                }
                None => {
                    fields.push((name.clone(), FieldKind::Real));
                    layout.push((k, false));
                    k += 1;
                }
            }
        }
        let mut ts = TimeSeries::new(fields);
        for row in rows {
            if row.len() != header.len() {
                return Err(TimeSeriesError::Parse(format!(
                    "row has {} values, header has {}",
                    row.len(),
                    header.len()
                )));
            }
            let record = layout
                .iter()
                .map(
                    |&(k, complex)| if complex { Sample::Complex(c(row[k], row[k + 1])) } else { Sample::Real(row[k]) },
                )
                .collect();
            ts.push(row[0], record)?;
        }
        Ok(ts)
    }
}

fn csv_error(e: csv::Error) -> TimeSeriesError {
    TimeSeriesError::Parse(e.to_string())
}

/// Write `ts` to `path` in the given format.
pub fn emit_timeseries(ts: &TimeSeries, format: Format, path: &Path) -> Result<(), TimeSeriesError> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => ts.write_csv(&mut w)?,
        Format::Json => ts.write_json(&mut w)?,
    }
    w.flush()?;
    Ok(())
}
