use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::solvers::{SolveReport, TraceRecord};

pub const TRACE_HEADER: &str = "iter,subproblems,err_X,err_2,objective,wall_ns";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the trace of `report` as CSV. Error columns are empty when the
/// solve had no reference.
pub fn write_trace(report: &SolveReport, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut out = BufWriter::new(file);
    write_trace_records(&report.trace, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_trace_records<W: Write>(records: &[TraceRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.iteration.to_string(),
            r.subproblems.to_string(),
            r.err_x.map(real).unwrap_or_default(),
            r.err_2.map(real).unwrap_or_default(),
            real(r.objective),
            r.wall_ns.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != TRACE_HEADER {
        return Err(Error::Parse { line: 1, message: format!("unexpected trace header '{}'", header.join(",")) });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |field: &str| Error::Parse { line, message: format!("invalid {field}") };
        if rec.len() != 6 {
            return Err(bad("field count"));
        }
        let opt = |s: &str, field: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(field))
            }
        };
        out.push(TraceRecord {
            iteration: rec[0].parse().map_err(|_| bad("iter"))?,
            subproblems: rec[1].parse().map_err(|_| bad("subproblems"))?,
            err_x: opt(&rec[2], "err_X")?,
            err_2: opt(&rec[3], "err_2")?,
            objective: rec[4].parse().map_err(|_| bad("objective"))?,
            wall_ns: rec[5].parse().map_err(|_| bad("wall_ns"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(i: usize, with_err: bool) -> TraceRecord {
        TraceRecord {
            iteration: i,
            subproblems: 2 * i,
            err_x: with_err.then(|| 1.0 / (i as f64 + 3.0)),
            err_2: with_err.then(|| std::f64::consts::E.powi(-(i as i32))),
            objective: 0.1 + i as f64 / 7.0,
            wall_ns: 1000 * i as u64,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace_records(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{TRACE_HEADER}\n"));
    }

    #[test]
    fn rows_and_empty_error_fields() {
        let mut buf = Vec::new();
        let recs: Vec<_> = (0..3).map(|i| record(i, false)).collect();
        write_trace_records(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        for (i, l) in lines[1..].iter().enumerate() {
            let fields: Vec<&str> = l.split(',').collect();
            assert_eq!(fields.len(), 6);
            assert_eq!(fields[0], i.to_string());
            assert_eq!(fields[2], "");
            assert_eq!(fields[3], "");
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let recs: Vec<_> = (0..5).map(|i| record(i, true)).collect();
        let mut f = File::create(&path).unwrap();
        write_trace_records(&recs, &mut f).unwrap();
        drop(f);
        assert_eq!(read_trace(&path).unwrap(), recs);
    }
}
