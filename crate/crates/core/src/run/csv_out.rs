//! Convergence tables as CSV.
//!
//! Errors are written in scientific notation with three significant digits
//! (`4.41e-02`), orders with two decimals, and `N/A` where an order is
//! undefined. Parsing the output yields [`CsvRecord`]s holding exactly the
//! printed values.

use std::io;

use crate::verify::{ConvergenceTable, Metric};

pub const CSV_HEADER: [&str; 15] = [
    "k", "epsilon", "level", "h", "n_dof", "err_u", "ord_u", "err_L", "ord_L", "err_p", "ord_p", "err_super", "ord_super",
    "err_z2_scaled", "ord_z2",
];

const NA: &str = "N/A";

/// One CSV line: errors and orders in [`Metric::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub k: usize,
    pub epsilon: f64,
    pub level: usize,
    pub h: f64,
    pub n_dof: usize,
    pub errors: [f64; 5],
    pub orders: [Option<f64>; 5],
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}, column {column}: cannot parse {value:?}")]
    Value { line: u64, column: &'static str, value: String },
}

pub fn format_error(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub fn format_order(o: Option<f64>) -> String {
    o.map_or_else(|| NA.to_string(), |v| format!("{v:.2}"))
}

fn reparse(s: &str) -> f64 {
    s.parse().expect("formatted number parses")
}

/// Records with every value rounded as printed.
pub fn records(tables: &[ConvergenceTable]) -> Vec<CsvRecord> {
    let mut out = Vec::new();
    for t in tables {
        for (i, r) in t.rows.iter().enumerate() {
            out.push(CsvRecord {
                k: t.k,
                epsilon: t.epsilon,
                level: r.level,
                h: r.h,
                n_dof: r.n_dof,
                errors: Metric::ALL.map(|m| reparse(&format_error(m.of(r)))),
                orders: Metric::ALL.map(|m| t.order(i, m).map(|o| reparse(&format_order(Some(o))))),
            });
        }
    }
    out
}

fn fields(r: &CsvRecord) -> Vec<String> {
    let mut f = vec![r.k.to_string(), format!("{:e}", r.epsilon), r.level.to_string(), format!("{:e}", r.h), r.n_dof.to_string()];
    for (e, o) in r.errors.iter().zip(&r.orders) {
        f.push(format_error(*e));
        f.push(format_order(*o));
    }
    f
}

pub fn write_records<W: io::Write>(out: W, records: &[CsvRecord]) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(fields(r))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv<W: io::Write>(out: W, tables: &[ConvergenceTable]) -> Result<(), CsvError> {
    write_records(out, &records(tables))
}

pub fn to_csv_string(tables: &[ConvergenceTable]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, tables).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>, CsvError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CsvError::Header(header));
    }
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| CsvError::Value { line, column: CSV_HEADER[i], value: get(i).to_string() };
        let int = |i: usize| get(i).parse::<usize>().map_err(|_| bad(i));
        let real = |i: usize| get(i).parse::<f64>().map_err(|_| bad(i));
        let order = |i: usize| if get(i) == NA { Ok(None) } else { real(i).map(Some) };
        let mut errors = [0.0; 5];
        let mut orders = [None; 5];
        for m in 0..5 {
            errors[m] = real(5 + 2 * m)?;
            orders[m] = order(6 + 2 * m)?;
        }
        out.push(CsvRecord { k: int(0)?, epsilon: real(1)?, level: int(2)?, h: real(3)?, n_dof: int(4)?, errors, orders });
    }
    Ok(out)
}
