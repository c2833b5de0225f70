//! Tabular output: CSV, JSON (array of flat objects) and aligned text.
//!
//! Floats are rendered to text once, with a per-column precision, and every
//! format is built from that text so the outputs agree on all platforms.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::census::CensusReport;
use crate::charsum::{BurgessCheck, PartialSumProfile, PvCheck};
use crate::error::Error;
use crate::nonresidue::{prime_index, DistributionReport, NonresidueRecord, TableRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "pretty" => Ok(Format::Pretty),
            _ => Err(Error::InvalidRange(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Pretty => "pretty",
        })
    }
}

/// C's `%.6g`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Two decimals, as in the least-nonresidue table.
pub fn fixed2(x: f64) -> String {
    format!("{x:.2}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    /// Already rendered; emitted as a JSON number.
    Float(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn sig6(x: f64) -> Self {
        Cell::Float(sig6(x))
    }

    pub fn fixed2(x: f64) -> Self {
        Cell::Float(fixed2(x))
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(v) => Value::from(v),
                Err(_) => Value::String(v.to_string()),
            },
            Cell::Float(s) => s
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or_else(|| Value::String(s.clone()), Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }

    fn right_aligned(&self) -> bool {
        matches!(self, Cell::Int(_) | Cell::Float(_))
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u8, u32, u64, usize, i8, i32, i64);

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Something that renders as one row of a fixed schema.
pub trait Row {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

/// Streams rows to `W`. Pretty output is buffered until `finish` because
/// column widths depend on every row.
pub struct ReportWriter<W: Write> {
    format: Format,
    columns: Vec<String>,
    state: State<W>,
}

enum State<W: Write> {
    Csv(Box<csv::Writer<W>>),
    Json { out: W, rows: usize },
    Pretty { out: W, rows: Vec<Vec<Cell>> },
}

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W, format: Format, columns: &[&str]) -> io::Result<Self> {
        let columns: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        let state = match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(&columns).map_err(csv_err)?;
                State::Csv(Box::new(w))
            }
            Format::Json => State::Json { out, rows: 0 },
            Format::Pretty => State::Pretty {
                out,
                rows: Vec::new(),
            },
        };
        Ok(Self {
            format,
            columns,
            state,
        })
    }

    pub fn for_row<R: Row>(out: W, format: Format) -> io::Result<Self> {
        Self::new(out, format, R::COLUMNS)
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn write_cells(&mut self, cells: Vec<Cell>) -> io::Result<()> {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        match &mut self.state {
            State::Csv(w) => w
                .write_record(cells.iter().map(Cell::render))
                .map_err(csv_err),
            State::Json { out, rows } => {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(cells.iter().map(Cell::json))
                    .collect();
                out.write_all(if *rows == 0 { b"[\n  " } else { b",\n  " })?;
                serde_json::to_writer(&mut *out, &obj)?;
                *rows += 1;
                Ok(())
            }
            State::Pretty { rows, .. } => {
                rows.push(cells);
                Ok(())
            }
        }
    }

    pub fn write<R: Row>(&mut self, row: &R) -> io::Result<()> {
        self.write_cells(row.cells())
    }

    pub fn finish(self) -> io::Result<W> {
        match self.state {
            State::Csv(w) => w.into_inner().map_err(|e| e.into_error()),
            State::Json { mut out, rows } => {
                out.write_all(if rows == 0 { b"[]\n" } else { b"\n]\n" })?;
                out.flush()?;
                Ok(out)
            }
            State::Pretty { mut out, rows } => {
                write_pretty(&mut out, &self.columns, &rows)?;
                out.flush()?;
                Ok(out)
            }
        }
    }
}

fn write_pretty(out: &mut impl Write, columns: &[String], rows: &[Vec<Cell>]) -> io::Result<()> {
    let text: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(Cell::render).collect())
        .collect();
    let widths: Vec<usize> = (0..columns.len())
        .map(|i| {
            text.iter()
                .map(|r| r[i].chars().count())
                .chain([columns[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let right: Vec<bool> = (0..columns.len())
        .map(|i| rows.iter().any(|r| r[i].right_aligned()))
        .collect();
    let line = |cells: &[String]| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .zip(&right)
            .map(|((c, &w), &r)| {
                if r {
                    format!("{c:>w$}")
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(columns))?;
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    writeln!(out, "{}", rule.join("  "))?;
    for r in &text {
        writeln!(out, "{}", line(r))?;
    }
    Ok(())
}

/// Whole table to a string.
pub fn render<R: Row>(rows: &[R], format: Format) -> String {
    let mut w = ReportWriter::for_row::<R>(Vec::new(), format).expect("in-memory write");
    for r in rows {
        w.write(r).expect("in-memory write");
    }
    String::from_utf8(w.finish().expect("in-memory write")).expect("utf-8")
}

impl Row for CensusReport {
    const COLUMNS: &'static [&'static str] = &[
        "p",
        "k",
        "pattern",
        "exact",
        "t_term",
        "p_over_2k",
        "residual",
        "peralta_bound",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.p.into(),
            self.k().into(),
            Cell::text(self.pattern.to_string()),
            self.exact.into(),
            Cell::sig6(self.t_term_f64()),
            Cell::sig6(self.p_over_2k),
            Cell::sig6(self.residual),
            Cell::sig6(self.peralta_bound),
        ]
    }
}

const TABLE1_COLUMNS: &[&str] = &["n", "p_n", "p", "scale", "c_p"];

impl Row for TableRow {
    const COLUMNS: &'static [&'static str] = TABLE1_COLUMNS;

    fn cells(&self) -> Vec<Cell> {
        let mut cells = vec![self.n.into(), self.p_n.into()];
        match &self.record {
            Some(r) => cells.extend([r.p.into(), Cell::fixed2(r.scale), Cell::fixed2(r.c_p)]),
            None => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        cells
    }
}

impl Row for NonresidueRecord {
    const COLUMNS: &'static [&'static str] = TABLE1_COLUMNS;

    fn cells(&self) -> Vec<Cell> {
        vec![
            prime_index(self.n_p).into(),
            self.n_p.into(),
            self.p.into(),
            Cell::fixed2(self.scale),
            Cell::fixed2(self.c_p),
        ]
    }
}

/// One line of a distribution report.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub n: usize,
    pub p_n: u64,
    pub count: u64,
    pub frequency: f64,
}

impl FrequencyRow {
    pub fn expected(&self) -> f64 {
        0.5f64.powi(self.n as i32)
    }
}

impl DistributionReport {
    pub fn rows(&self) -> Vec<FrequencyRow> {
        (1..=self.counts.len())
            .map(|n| FrequencyRow {
                n,
                p_n: crate::nonresidue::nth_prime(n),
                count: self.count(n),
                frequency: self.frequency(n),
            })
            .collect()
    }
}

impl Row for FrequencyRow {
    const COLUMNS: &'static [&'static str] =
        &["n", "p_n", "count", "frequency", "expected", "deviation"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.n.into(),
            self.p_n.into(),
            self.count.into(),
            Cell::sig6(self.frequency),
            Cell::sig6(self.expected()),
            Cell::sig6(self.frequency - self.expected()),
        ]
    }
}

/// Summary line of a partial-sum profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub pv: PvCheck,
    pub longest_inc_run: u64,
    pub longest_dec_run: u64,
}

impl From<&PartialSumProfile> for ProfileRow {
    fn from(pr: &PartialSumProfile) -> Self {
        Self {
            pv: crate::charsum::pv_check_profile(pr),
            longest_inc_run: pr.longest_inc_run,
            longest_dec_run: pr.longest_dec_run,
        }
    }
}

impl Row for ProfileRow {
    const COLUMNS: &'static [&'static str] = &[
        "p",
        "max_abs",
        "pv_bound",
        "ratio",
        "longest_inc_run",
        "longest_dec_run",
    ];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.pv.p.into(),
            self.pv.max_abs.into(),
            Cell::sig6(self.pv.bound),
            Cell::sig6(self.pv.ratio),
            self.longest_inc_run.into(),
            self.longest_dec_run.into(),
        ]
    }
}

impl Row for BurgessCheck {
    const COLUMNS: &'static [&'static str] = &["p", "m", "n", "r", "abs_sum", "bound", "satisfied"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.p.into(),
            self.start.into(),
            self.len.into(),
            self.r.into(),
            self.sum.unsigned_abs().into(),
            Cell::sig6(self.bound),
            self.satisfied.into(),
        ]
    }
}

/// Numeric Gauss sum next to its closed form `eta_p sqrt(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRow {
    pub p: u64,
    pub eta: crate::expsums::Eta,
    pub sum: crate::expsums::ComplexValue,
}

impl GaussRow {
    pub fn error(&self) -> f64 {
        (self.sum - self.eta.value() * (self.p as f64).sqrt()).norm()
    }
}

impl Row for GaussRow {
    const COLUMNS: &'static [&'static str] = &["p", "eta", "re", "im", "abs", "error"];

    fn cells(&self) -> Vec<Cell> {
        let eta = match self.eta {
            crate::expsums::Eta::One => "1",
            crate::expsums::Eta::I => "i",
        };
        vec![
            self.p.into(),
            Cell::text(eta),
            Cell::sig6(self.sum.re),
            Cell::sig6(self.sum.im),
            Cell::sig6(self.sum.norm()),
            Cell::sig6(self.error()),
        ]
    }
}
