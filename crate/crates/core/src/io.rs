//! CSV samples.
//!
//! Files are comma separated UTF-8 with one header line. Values are written
//! in Rust's shortest round-trip representation, so reading a written file
//! reproduces every value exactly and the output does not depend on locale.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::gram::RealMatrix;
use crate::kernels::VariableBlock;
use crate::sample::Sample;

/// Variable name to 1-based inclusive column range, e.g. `x:1-3,y:4-6,z:7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    entries: Vec<(String, usize, usize)>,
}

impl ColumnSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in spec.split(',').map(str::trim) {
            let (name, range) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("column spec `{part}` is not `name:lo-hi` or `name:col`")))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::invalid(format!("column spec `{part}` has no variable name")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::invalid(format!("bad column number `{s}` in `{part}`")))
            };
            let (lo, hi) = match range.split_once('-') {
                Some((lo, hi)) => (num(lo)?, num(hi)?),
                None => {
                    let c = num(range)?;
                    (c, c)
                }
            };
            if lo == 0 || hi < lo {
                return Err(Error::invalid(format!("empty or zero-based range in `{part}`")));
            }
            entries.push((name.to_string(), lo, hi));
        }
        let spec = Self { entries };
        spec.check_disjoint()?;
        Ok(spec)
    }

    /// Consecutive ranges matching the block layout of `sample`.
    pub fn for_sample(sample: &Sample) -> Self {
        let mut next = 1;
        let entries = sample
            .names()
            .iter()
            .zip(sample.blocks())
            .map(|(name, block)| {
                let e = (name.clone(), next, next + block.d() - 1);
                next += block.d();
                e
            })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[(String, usize, usize)] {
        &self.entries
    }

    fn check_disjoint(&self) -> Result<()> {
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if a.0 == b.0 {
                    return Err(Error::invalid(format!("variable `{}` declared twice", a.0)));
                }
                if a.1 <= b.2 && b.1 <= a.2 {
                    return Err(Error::invalid(format!("column ranges of `{}` and `{}` overlap", a.0, b.0)));
                }
            }
        }
        Ok(())
    }

    /// Checks every range against a file of `width` columns.
    pub fn validate(&self, width: usize) -> Result<()> {
        self.check_disjoint()?;
        if let Some((name, _, hi)) = self.entries.iter().find(|e| e.2 > width) {
            return Err(Error::invalid(format!(
                "variable `{name}` needs column {hi} but the file has {width}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ColumnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, lo, hi)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if lo == hi {
                write!(f, "{name}:{lo}")?;
            } else {
                write!(f, "{name}:{lo}-{hi}")?;
            }
        }
        Ok(())
    }
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses CSV text (header line plus numeric rows) into a sample.
pub fn parse_sample(reader: impl Read, columns: &ColumnSpec, path: &Path) -> Result<Sample> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let width = csv
        .headers()
        .map_err(|e| parse_error(path, 1, e.to_string()))?
        .len();
    columns.validate(width)?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_error(path, line, format!("column {}: `{field}` is not a finite number", c + 1))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, 2, "no data rows"));
    }

    let n = rows.len();
    let named = columns
        .entries()
        .iter()
        .map(|(name, lo, hi)| {
            let d = hi - lo + 1;
            let mut data = Vec::with_capacity(n * d);
            for row in &rows {
                data.extend_from_slice(&row[lo - 1..*hi]);
            }
            Ok((name.clone(), VariableBlock::new(RealMatrix::new(n, d, data)?)))
        })
        .collect::<Result<Vec<_>>>()?;
    Sample::new(named)
}

pub fn read_sample(path: impl AsRef<Path>, columns: &ColumnSpec) -> Result<Sample> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sample(file, columns, path)
}

/// Header names: the variable name for 1-D blocks, `name1…named` otherwise.
pub fn header(sample: &Sample) -> Vec<String> {
    sample
        .names()
        .iter()
        .zip(sample.blocks())
        .flat_map(|(name, block)| {
            if block.d() == 1 {
                vec![name.clone()]
            } else {
                (1..=block.d()).map(|c| format!("{name}{c}")).collect()
            }
        })
        .collect()
}

pub fn write_sample_to(mut out: impl Write, sample: &Sample) -> std::io::Result<()> {
    writeln!(out, "{}", header(sample).join(","))?;
    let mut line = String::new();
    for i in 0..sample.n() {
        line.clear();
        for v in sample.blocks().iter().flat_map(|b| b.point(i)) {
            if !line.is_empty() {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub fn write_sample(path: impl AsRef<Path>, sample: &Sample) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_sample_to(BufWriter::new(file), sample).map_err(io_err)
}
