//! File formats: price CSVs, state-space series CSVs, chain traces,
//! key/value summaries and covariance matrices.
//!
//! All numbers are written with Rust's shortest round-trip formatting, so
//! reading a file back reproduces every value bit for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::models::TimeSeries;
use crate::pmh::ChainTrace;

/// Formats a float so that parsing it back gives the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Error::input(Some(row), format!("column `{column}`: `{cell}` is not a number")))
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader)
}

fn csv_error(err: csv::Error) -> Error {
    let row = err.position().map(|p| p.line().saturating_sub(1) as usize);
    Error::input(row, err.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Daily closing prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<String>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    /// Prices with dates in `[from, to]` (ISO-8601 strings compare in date order).
    pub fn window(&self, from: &str, to: &str) -> PriceSeries {
        let (dates, closes) = self
            .dates
            .iter()
            .zip(&self.closes)
            .filter(|(d, _)| d.as_str() >= from && d.as_str() <= to)
            .map(|(d, c)| (d.clone(), *c))
            .unzip();
        PriceSeries { dates, closes }
    }
}

const CLOSE_COLUMNS: [&str; 5] = ["close", "index value", "closing price", "close price", "adj close"];

/// Reads a price CSV with a `date` column and a closing-price column
/// (`close`, or the `Index Value` column of the Quandl NASDAQ OMX layout).
///
/// Files listed newest-first are reversed; any other ordering that is not
/// strictly increasing is rejected.
pub fn read_prices<R: Read>(reader: R) -> Result<PriceSeries> {
    let mut rdr = csv_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let date_col = headers
        .iter()
        .position(|h| h == "date")
        .ok_or_else(|| Error::input(None, "missing `date` header"))?;
    let close_col = headers
        .iter()
        .position(|h| CLOSE_COLUMNS.contains(&h.as_str()))
        .ok_or_else(|| Error::input(None, "missing closing-price header (e.g. `close`)"))?;

    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_error)?;
        let date = record.get(date_col).unwrap_or("").trim();
        NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|_| Error::input(Some(row), format!("`{date}` is not an ISO-8601 date")))?;
        let close = parse_f64(record.get(close_col).unwrap_or(""), row, "close")?;
        if close <= 0.0 || !close.is_finite() {
            return Err(Error::input(Some(row), format!("closing price must be positive, got {close}")));
        }
        dates.push(date.to_string());
        closes.push(close);
    }

    if dates.windows(2).all(|w| w[0] > w[1]) && dates.len() > 1 {
        dates.reverse();
        closes.reverse();
    }
    if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::input(Some(i + 2), "dates are not strictly increasing"));
    }
    Ok(PriceSeries { dates, closes })
}

pub fn read_prices_file(path: &Path) -> Result<PriceSeries> {
    read_prices(open(path)?)
}

/// `y_t = 100 (ln s_t - ln s_{t-1})`.
pub fn compute_log_returns(prices: &PriceSeries) -> Result<TimeSeries> {
    if prices.closes.len() < 2 {
        return Err(Error::input(None, "need at least two prices"));
    }
    if let Some(i) = prices.closes.iter().position(|&c| c.is_nan() || c <= 0.0) {
        return Err(Error::input(Some(i + 1), format!("non-positive price {}", prices.closes[i])));
    }
    let returns = prices
        .closes
        .windows(2)
        .map(|w| 100.0 * (w[1].ln() - w[0].ln()))
        .collect();
    Ok(TimeSeries::from_observations(returns))
}

/// Reads a `t,x,y` (simulated) or `t,y` (observed) series.
///
/// In the `t,x,y` layout the row `t = 0` carries `x_0` and an empty `y`.
pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut rdr = csv_reader(reader);
    let headers: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(|h| h.to_string()).collect();
    let has_states = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["t", "x", "y"] => true,
        ["t", "y"] => false,
        _ => {
            return Err(Error::input(
                None,
                format!("expected header `t,x,y` or `t,y`, found `{}`", headers.join(",")),
            ))
        }
    };
    let y_col = if has_states { 2 } else { 1 };

    let mut states = Vec::new();
    let mut observations = Vec::new();
    let mut expected_t = None;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_error)?;
        let t: usize = record[0]
            .parse()
            .map_err(|_| Error::input(Some(row), format!("column `t`: `{}` is not an index", &record[0])))?;
        let expected = *expected_t.get_or_insert(t);
        if t != expected || (row == 1 && t > 1) {
            return Err(Error::input(Some(row), format!("expected t = {expected}, found {t}")));
        }
        expected_t = Some(t + 1);
        if has_states {
            states.push(parse_f64(&record[1], row, "x")?);
        }
        if t == 0 {
            if !record[y_col].is_empty() {
                return Err(Error::input(Some(row), "row t = 0 must have an empty y"));
            }
        } else {
            observations.push(parse_f64(&record[y_col], row, "y")?);
        }
    }
    if observations.is_empty() {
        return Err(Error::input(None, "no observations"));
    }
    if has_states {
        if states.len() != observations.len() + 1 {
            return Err(Error::input(None, "a `t,x,y` file must start at t = 0"));
        }
        Ok(TimeSeries {
            initial_state: states[0],
            states: Some(states),
            observations,
        })
    } else {
        Ok(TimeSeries::from_observations(observations))
    }
}

pub fn read_series_file(path: &Path) -> Result<TimeSeries> {
    read_series(open(path)?)
}

pub fn write_series<W: Write>(series: &TimeSeries, mut out: W) -> Result<()> {
    let mut s = String::new();
    match &series.states {
        Some(x) => {
            s.push_str("t,x,y\n");
            let _ = writeln!(s, "0,{},", fmt_f64(x[0]));
            for (t, y) in series.observations.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", t + 1, fmt_f64(x[t + 1]), fmt_f64(*y));
            }
        }
        None => {
            s.push_str("t,y\n");
            for (t, y) in series.observations.iter().enumerate() {
                let _ = writeln!(s, "{},{}", t + 1, fmt_f64(*y));
            }
        }
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// `iteration,<parameter names...>,loglik,accepted` with `accepted` as 0/1.
pub fn write_trace<W: Write>(trace: &ChainTrace, mut out: W) -> Result<()> {
    let mut s = String::from("iteration");
    for name in &trace.parameter_names {
        s.push(',');
        s.push_str(name);
    }
    s.push_str(",loglik,accepted\n");
    for k in 0..trace.len() {
        let _ = write!(s, "{k}");
        for v in &trace.parameters[k] {
            let _ = write!(s, ",{}", fmt_f64(*v));
        }
        let _ = writeln!(s, ",{},{}", fmt_f64(trace.log_likelihoods[k]), u8::from(trace.accepted[k]));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_trace<R: Read>(reader: R) -> Result<ChainTrace> {
    let mut rdr = csv_reader(reader);
    let headers: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(|h| h.to_string()).collect();
    let n = headers.len();
    if n < 4 || headers[0] != "iteration" || headers[n - 2] != "loglik" || headers[n - 1] != "accepted" {
        return Err(Error::input(None, "expected header `iteration,<params...>,loglik,accepted`"));
    }
    let names = headers[1..n - 2].to_vec();
    let mut trace = ChainTrace {
        parameter_names: names.clone(),
        parameters: Vec::new(),
        log_likelihoods: Vec::new(),
        accepted: Vec::new(),
        state_trajectories: None,
    };
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_error)?;
        let params = names
            .iter()
            .enumerate()
            .map(|(j, name)| parse_f64(&record[j + 1], row, name))
            .collect::<Result<Vec<_>>>()?;
        trace.parameters.push(params);
        trace.log_likelihoods.push(parse_f64(&record[n - 2], row, "loglik")?);
        trace.accepted.push(match &record[n - 1] {
            "1" => true,
            "0" => false,
            other => return Err(Error::input(Some(row), format!("accepted flag must be 0 or 1, got `{other}`"))),
        });
    }
    Ok(trace)
}

pub fn read_trace_file(path: &Path) -> Result<ChainTrace> {
    read_trace(open(path)?)
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn number(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.entries.push((key.into(), fmt_f64(value)));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        out.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Summary> {
        let mut summary = Summary::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::input(Some(i + 1), "expected `key = value`"))?;
            summary.text(k.trim(), v.trim());
        }
        Ok(summary)
    }
}

/// Comma-separated rows without a header.
pub fn write_matrix<W: Write>(m: &DMatrix<f64>, mut out: W) -> Result<()> {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

pub fn read_matrix<R: Read>(mut reader: R) -> Result<DMatrix<f64>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|c| parse_f64(c, i + 1, "matrix"))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::input(None, "matrix file must hold a non-empty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn read_matrix_file(path: &Path) -> Result<DMatrix<f64>> {
    read_matrix(open(path)?)
}
