use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataFormat {
    /// `label idx:val idx:val …` with 1-based indices.
    LibsvmText,
    /// Comma-separated, response in the first column, optional header.
    DenseCsv,
}

impl DataFormat {
    /// Guesses the format from the file extension (`.csv` is dense CSV,
    /// anything else LIBSVM text).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DataFormat::DenseCsv,
            _ => DataFormat::LibsvmText,
        }
    }
}

pub fn load_dataset(path: &Path, format: DataFormat) -> Result<(DenseMatrix, Vec<f64>)> {
    let file = File::open(path)?;
    parse_dataset(BufReader::new(file), format, path)
}

/// Parses from any reader; `origin` is used in error messages.
pub fn parse_dataset<R: Read>(reader: R, format: DataFormat, origin: &Path) -> Result<(DenseMatrix, Vec<f64>)> {
    match format {
        DataFormat::LibsvmText => parse_libsvm(BufReader::new(reader), origin),
        DataFormat::DenseCsv => parse_csv(reader, origin),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_real(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite {what} '{tok}'")));
    }
    Ok(v)
}

fn parse_libsvm<R: BufRead>(reader: R, origin: &Path) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut labels = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut p = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = parse_real(tokens.next().expect("non-empty line"), line_no, "label")?;
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for tok in tokens {
            let (idx, val) =
                tok.split_once(':').ok_or_else(|| parse_err(line_no, format!("expected idx:val, got '{tok}'")))?;
            let idx: usize = idx.parse().map_err(|_| parse_err(line_no, format!("invalid feature index '{idx}'")))?;
            if idx == 0 {
                return Err(parse_err(line_no, "feature indices are 1-based"));
            }
            if !seen.insert(idx) {
                return Err(parse_err(line_no, format!("duplicate feature index {idx}")));
            }
            let val = parse_real(val, line_no, "feature value")?;
            p = p.max(idx);
            entries.push((idx - 1, val));
        }
        labels.push(label);
        rows.push(entries);
    }
    if labels.is_empty() {
        return Err(Error::EmptyFile(origin.to_path_buf()));
    }
    if p == 0 {
        return Err(parse_err(1, "no features in file"));
    }
    let mut data = vec![0.0; labels.len() * p];
    for (r, entries) in rows.iter().enumerate() {
        for &(j, v) in entries {
            data[r * p + j] = v;
        }
    }
    Ok((DenseMatrix::from_row_major(labels.len(), p, data)?, labels))
}

fn parse_csv<R: Read>(reader: R, origin: &Path) -> Result<(DenseMatrix, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut y = Vec::new();
    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line_no = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let first = rec.get(0).unwrap_or("");
        if i == 0 && first.parse::<f64>().is_err() {
            continue;
        }
        if rec.len() < 2 {
            return Err(parse_err(line_no, "expected a response and at least one feature"));
        }
        match width {
            None => width = Some(rec.len()),
            Some(w) if w != rec.len() => {
                return Err(parse_err(line_no, format!("expected {w} fields, found {}", rec.len())))
            }
            _ => {}
        }
        y.push(parse_real(first, line_no, "response")?);
        for f in rec.iter().skip(1) {
            data.push(parse_real(f, line_no, "feature value")?);
        }
    }
    let Some(w) = width else {
        return Err(Error::EmptyFile(origin.to_path_buf()));
    };
    Ok((DenseMatrix::from_row_major(y.len(), w - 1, data)?, y))
}

/// Writes `y` and `X` as dense CSV with a `y,x1,…,xp` header. Values use
/// the shortest representation that reads back exactly.
pub fn write_dense_csv(path: &Path, x: &DenseMatrix, y: &[f64]) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!("{} responses for {} rows", y.len(), x.rows())));
    }
    let mut out = BufWriter::new(File::create(path)?);
    let mut header = String::from("y");
    for j in 1..=x.cols() {
        header.push_str(&format!(",x{j}"));
    }
    writeln!(out, "{header}")?;
    let mut line = String::new();
    for (i, yi) in y.iter().enumerate() {
        line.clear();
        line.push_str(&format!("{yi}"));
        for v in x.row(i) {
            line.push_str(&format!(",{v}"));
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}
