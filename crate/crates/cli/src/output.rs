//! CSV and JSON emitters. Every float is written with 17 significant digits
//! and complex numbers as `[re, im]`, so files round-trip exactly and two runs
//! of the same configuration are byte-identical.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::Format;
use crate::sweep::{SweepResult, SweepRow};

pub const SWEEP_COLUMNS: [&str; 7] = [
    "parameter",
    "invariant",
    "quantization_error",
    "rank_plus",
    "rank_minus",
    "kramers_pairs",
    "status",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// A float that serializes to JSON with 17 significant digits.
#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt_f64(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub fn pair(z: Complex64) -> [Fixed; 2] {
    [Fixed(z.re), Fixed(z.im)]
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_COLUMNS)?;
    for r in &result.rows {
        out.write_record([
            fmt_f64(r.parameter),
            opt(r.invariant),
            opt(r.quantization_error.map(fmt_f64)),
            opt(r.rank_plus),
            opt(r.rank_minus),
            opt(r.kramers_pairs),
            r.status.clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: std::io::Read>(r: R) -> Result<SweepResult> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    anyhow::ensure!(header == SWEEP_COLUMNS, "unexpected columns {header:?}");
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        fn parse<T: std::str::FromStr>(s: &str) -> Result<Option<T>>
        where
            T::Err: std::error::Error + Send + Sync + 'static,
        {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse()?))
            }
        }
        rows.push(SweepRow {
            parameter: f(0).parse()?,
            invariant: parse(f(1))?,
            quantization_error: parse(f(2))?,
            rank_plus: parse(f(3))?,
            rank_minus: parse(f(4))?,
            kramers_pairs: parse(f(5))?,
            status: f(6).to_string(),
        });
    }
    Ok(SweepResult { rows })
}

#[derive(serde::Serialize)]
struct JsonRow<'a> {
    parameter: Fixed,
    invariant: Option<i64>,
    quantization_error: Option<Fixed>,
    rank_plus: Option<usize>,
    rank_minus: Option<usize>,
    kramers_pairs: Option<usize>,
    status: &'a str,
}

pub fn write_sweep_json<W: Write>(result: &SweepResult, mut w: W) -> Result<()> {
    let rows: Vec<JsonRow> = result
        .rows
        .iter()
        .map(|r| JsonRow {
            parameter: Fixed(r.parameter),
            invariant: r.invariant,
            quantization_error: r.quantization_error.map(Fixed),
            rank_plus: r.rank_plus,
            rank_minus: r.rank_minus,
            kramers_pairs: r.kramers_pairs,
            status: &r.status,
        })
        .collect();
    serde_json::to_writer_pretty(&mut w, &rows)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_sweep_json<R: std::io::Read>(r: R) -> Result<SweepResult> {
    Ok(SweepResult {
        rows: serde_json::from_reader(r)?,
    })
}

pub fn write_sweep<W: Write>(result: &SweepResult, format: Format, w: W) -> Result<()> {
    match format {
        Format::Csv => write_sweep_csv(result, w),
        Format::Json => write_sweep_json(result, w),
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut buf = std::io::BufWriter::new(file);
            f(&mut buf).with_context(|| format!("writing {}", p.display()))?;
            buf.flush().with_context(|| format!("writing {}", p.display()))?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}

/// Writes plain tabular data: a header and rows of preformatted cells.
pub fn write_table<W: Write>(columns: &[&str], rows: &[Vec<String>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(columns)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
