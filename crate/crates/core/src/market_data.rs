//! Price ingestion, cross-asset alignment and daily arithmetic returns.
//!
//! Missing prices are handled by date intersection (rows are dropped), not
//! forward-fill. Returns across calendar gaps are computed over adjacent
//! intersected dates with no annualization adjustment.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::{Error, Result};

/// One asset's daily unadjusted close prices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceSeries<T> {
    pub ticker: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<T>,
}

impl<T: Real> PriceSeries<T> {
    /// Validates: strictly increasing dates, positive finite closes,
    /// matching lengths.
    pub fn new(ticker: impl Into<String>, dates: Vec<NaiveDate>, closes: Vec<T>) -> Result<Self> {
        let ticker = ticker.into();
        if dates.len() != closes.len() {
            return Err(Error::Input(format!(
                "ticker {ticker}: {} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        for pair in dates.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Validation {
                    row: 0,
                    ticker: ticker.clone(),
                    message: format!("dates not strictly increasing at {}", pair[1]),
                });
            }
        }
        for (date, close) in dates.iter().zip(closes.iter()) {
            if !(close.is_finite() && *close > T::zero()) {
                return Err(Error::Validation {
                    row: 0,
                    ticker: ticker.clone(),
                    message: format!("non-positive close {close} on {date}"),
                });
            }
        }
        Ok(Self {
            ticker,
            dates,
            closes,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Aligned T x N matrix of daily arithmetic returns.
///
/// Every row corresponds to a date on which all `N` assets have a return;
/// tickers are ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnPanel<T> {
    pub tickers: Vec<String>,
    pub dates: Vec<NaiveDate>,
    /// Row-major: `returns[t][i]` is asset `i` on date `dates[t]`.
    pub returns: Vec<Vec<T>>,
}

impl<T: Real> ReturnPanel<T> {
    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    /// Column of returns for one asset.
    pub fn column(&self, asset: usize) -> Vec<T> {
        self.returns.iter().map(|row| row[asset]).collect()
    }

    /// Portfolio return series `r_t^T w`.
    pub fn portfolio_returns(&self, weights: &[T]) -> Vec<T> {
        self.returns
            .iter()
            .map(|row| row.iter().zip(weights.iter()).map(|(&r, &w)| r * w).sum())
            .collect()
    }

    /// Sub-panel over the row range `[start, end)`.
    pub fn slice_rows(&self, start: usize, end: usize) -> ReturnPanel<T> {
        ReturnPanel {
            tickers: self.tickers.clone(),
            dates: self.dates[start..end].to_vec(),
            returns: self.returns[start..end].to_vec(),
        }
    }

    /// Canonical CSV: header `date,T1,...,TN`, cells at 12 significant
    /// digits. Byte-stable under write -> read -> write.
    pub fn to_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "date")?;
        for ticker in &self.tickers {
            write!(w, ",{ticker}")?;
        }
        writeln!(w)?;
        for (date, row) in self.dates.iter().zip(self.returns.iter()) {
            write!(w, "{date}")?;
            for value in row {
                write!(w, ",{}", format_sig12(value.as_f64()))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parses a canonical returns CSV (all cells required and finite).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Input(format!("missing header row: {e}")))?
            .clone();
        if headers.is_empty() || headers.get(0) != Some("date") {
            return Err(Error::Input(
                "header must start with a `date` column".to_string(),
            ));
        }
        let tickers: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        if tickers.is_empty() {
            return Err(Error::Input("no ticker columns in header".to_string()));
        }
        let mut dates = Vec::new();
        let mut returns = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let row = idx + 2; // header is row 1
            let record = record?;
            let date = parse_date(record.get(0).unwrap_or(""), row)?;
            let mut values = Vec::with_capacity(tickers.len());
            for (i, ticker) in tickers.iter().enumerate() {
                let cell = record.get(i + 1).unwrap_or("");
                let value: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    message: format!("unparseable return `{cell}` for {ticker}"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Validation {
                        row,
                        ticker: ticker.clone(),
                        message: "non-finite return".to_string(),
                    });
                }
                values.push(T::of(value));
            }
            dates.push(date);
            returns.push(values);
        }
        if dates.is_empty() {
            return Err(Error::Input("returns CSV has no data rows".to_string()));
        }
        Ok(ReturnPanel {
            tickers,
            dates,
            returns,
        })
    }
}

/// Risk-free rate quoted per year with its daily conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RiskFreeRate<T> {
    pub annual_rate: T,
    pub trading_days: u32,
    pub daily_rate: T,
}

impl<T: Real> RiskFreeRate<T> {
    /// Zero rate (flowchart-literal objectives).
    pub fn zero() -> Self {
        Self {
            annual_rate: T::zero(),
            trading_days: DEFAULT_TRADING_DAYS,
            daily_rate: T::zero(),
        }
    }
}

/// Day-count divisor used in the annual-to-daily rate conversion.
pub const DEFAULT_TRADING_DAYS: u32 = 252;

/// Converts an annualized rate to an effective daily rate,
/// `daily = annual / trading_days`.
pub fn daily_risk_free<T: Real>(annual_rate: T, trading_days: u32) -> Result<RiskFreeRate<T>> {
    if trading_days == 0 {
        return Err(Error::Domain(
            "trading_days must be positive".to_string(),
        ));
    }
    if !annual_rate.is_finite() {
        return Err(Error::Domain(format!(
            "annual rate must be finite, got {annual_rate}"
        )));
    }
    Ok(RiskFreeRate {
        annual_rate,
        trading_days,
        daily_rate: annual_rate / T::of(f64::from(trading_days)),
    })
}

/// Reads a wide price CSV (`date,T1,...,TN`; empty cells are missing) into
/// one [`PriceSeries`] per ticker column, each sorted by date.
pub fn load_prices<T: Real, R: Read>(reader: R) -> Result<Vec<PriceSeries<T>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) if !h.is_empty() => h.clone(),
        _ => return Err(Error::Input("empty or headerless CSV".to_string())),
    };
    if headers.get(0) != Some("date") {
        return Err(Error::Input(format!(
            "first header column must be `date`, got `{}`",
            headers.get(0).unwrap_or("")
        )));
    }
    let tickers: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if tickers.is_empty() {
        return Err(Error::Input("no ticker columns in header".to_string()));
    }

    let mut columns: Vec<Vec<(NaiveDate, T)>> = vec![Vec::new(); tickers.len()];
    let mut any_row = false;
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 2; // header is row 1
        let record = record?;
        any_row = true;
        let date = parse_date(record.get(0).unwrap_or(""), row)?;
        for (i, ticker) in tickers.iter().enumerate() {
            let cell = record.get(i + 1).unwrap_or("").trim();
            if cell.is_empty() {
                continue; // missing price: omitted from this series
            }
            let price: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                message: format!("unparseable price `{cell}` for {ticker}"),
            })?;
            if !price.is_finite() || price <= 0.0 {
                return Err(Error::Validation {
                    row,
                    ticker: ticker.clone(),
                    message: format!("non-positive price {price}"),
                });
            }
            columns[i].push((date, T::of(price)));
        }
    }
    if !any_row {
        return Err(Error::Input("price CSV has no data rows".to_string()));
    }

    let mut series = Vec::with_capacity(tickers.len());
    for (ticker, mut cells) in tickers.into_iter().zip(columns.into_iter()) {
        cells.sort_by_key(|(date, _)| *date);
        for pair in cells.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Validation {
                    row: 0,
                    ticker: ticker.clone(),
                    message: format!("duplicate date {}", pair[0].0),
                });
            }
        }
        let (dates, closes): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
        series.push(PriceSeries::new(ticker, dates, closes)?);
    }
    Ok(series)
}

/// Aligns price series on their common dates and computes daily arithmetic
/// returns `P_t / P_{t-1} - 1` over adjacent intersected dates.
///
/// The first intersected date is dropped; ticker columns come out in
/// lexicographic order.
pub fn to_return_panel<T: Real>(series: &[PriceSeries<T>]) -> Result<ReturnPanel<T>> {
    if series.is_empty() {
        return Err(Error::Input("no price series to align".to_string()));
    }
    let mut common: BTreeSet<NaiveDate> = series[0].dates.iter().copied().collect();
    for s in &series[1..] {
        let dates: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.len() < 2 {
        let ranges: Vec<String> = series
            .iter()
            .map(|s| match (s.dates.first(), s.dates.last()) {
                (Some(a), Some(b)) => format!("{}: {a}..{b} ({} dates)", s.ticker, s.len()),
                _ => format!("{}: empty", s.ticker),
            })
            .collect();
        return Err(Error::Alignment(format!(
            "common dates across all series: {} (need >= 2); per-ticker ranges: [{}]",
            common.len(),
            ranges.join(", ")
        )));
    }
    let dates: Vec<NaiveDate> = common.into_iter().collect();

    let mut order: Vec<usize> = (0..series.len()).collect();
    order.sort_by(|&a, &b| series[a].ticker.cmp(&series[b].ticker));

    // closes per ordered asset, restricted to the intersection
    let mut aligned: Vec<Vec<T>> = Vec::with_capacity(order.len());
    for &idx in &order {
        let s = &series[idx];
        let mut closes = Vec::with_capacity(dates.len());
        let mut cursor = 0;
        for date in &dates {
            while s.dates[cursor] != *date {
                cursor += 1;
            }
            closes.push(s.closes[cursor]);
        }
        aligned.push(closes);
    }

    let tickers: Vec<String> = order.iter().map(|&i| series[i].ticker.clone()).collect();
    let mut returns = Vec::with_capacity(dates.len() - 1);
    for t in 1..dates.len() {
        let row: Vec<T> = aligned
            .iter()
            .map(|closes| closes[t] / closes[t - 1] - T::one())
            .collect();
        returns.push(row);
    }
    Ok(ReturnPanel {
        tickers,
        dates: dates[1..].to_vec(),
        returns,
    })
}

fn parse_date(cell: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(cell.trim(), "%Y-%m-%d").map_err(|_| Error::Parse {
        row,
        message: format!("malformed date `{cell}` (expected YYYY-MM-DD)"),
    })
}

/// Formats a value with 12 significant digits, stable under re-parsing.
pub fn format_sig12(value: f64) -> String {
    format!("{value:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn loads_minimal_two_row_file() {
        let csv = "date,AAPL\n2021-01-04,100.0\n2021-01-05,101.0\n";
        let series: Vec<PriceSeries<f64>> = load_prices(csv.as_bytes()).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].ticker, "AAPL");
        assert_eq!(series[0].len(), 2);
        assert_eq!(series[0].closes, vec![100.0, 101.0]);
    }

    #[test]
    fn negative_price_names_row_and_ticker() {
        let csv = "date,AAPL,MSFT\n2021-01-04,100.0,50.0\n2021-01-05,-5.0,51.0\n";
        let err = load_prices::<f64, _>(csv.as_bytes()).unwrap_err();
        match err {
            Error::Validation { row, ticker, .. } => {
                assert_eq!(row, 3);
                assert_eq!(ticker, "AAPL");
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn malformed_date_names_row() {
        let csv = "date,AAPL\n2021-01-04,100.0\n01/05/2021,101.0\n";
        let err = load_prices::<f64, _>(csv.as_bytes()).unwrap_err();
        match err {
            Error::Parse { row, .. } => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn empty_file_is_input_error() {
        assert!(matches!(
            load_prices::<f64, _>("".as_bytes()),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            load_prices::<f64, _>("date,AAPL\n".as_bytes()),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn unsorted_rows_are_sorted_by_date() {
        let csv = "date,X\n2021-01-06,102.0\n2021-01-04,100.0\n2021-01-05,101.0\n";
        let series: Vec<PriceSeries<f64>> = load_prices(csv.as_bytes()).unwrap();
        assert_eq!(series[0].closes, vec![100.0, 101.0, 102.0]);
    }

    #[test]
    fn returns_hand_arithmetic() {
        let s = PriceSeries::<f64>::new(
            "X",
            vec![date("2021-01-04"), date("2021-01-05"), date("2021-01-06")],
            vec![100.0, 110.0, 99.0],
        )
        .unwrap();
        let panel = to_return_panel(&[s]).unwrap();
        assert_eq!(panel.n_rows(), 2);
        assert!((panel.returns[0][0] - 0.10).abs() < 1e-15);
        assert!((panel.returns[1][0] + 0.10).abs() < 1e-15);
    }

    #[test]
    fn constant_prices_give_zero_returns() {
        let s = PriceSeries::<f64>::new(
            "X",
            vec![date("2021-01-04"), date("2021-01-05"), date("2021-01-06")],
            vec![50.0, 50.0, 50.0],
        )
        .unwrap();
        let panel = to_return_panel(&[s]).unwrap();
        assert_eq!(panel.returns, vec![vec![0.0], vec![0.0]]);
    }

    #[test]
    fn intersection_skips_missing_middle_date() {
        let a = PriceSeries::<f64>::new(
            "A",
            vec![date("2021-01-04"), date("2021-01-05"), date("2021-01-06")],
            vec![100.0, 110.0, 121.0],
        )
        .unwrap();
        let b = PriceSeries::<f64>::new(
            "B",
            vec![date("2021-01-04"), date("2021-01-06")],
            vec![10.0, 20.0],
        )
        .unwrap();
        let panel = to_return_panel(&[a, b]).unwrap();
        // intersection {01-04, 01-06}: one return row computed across the gap
        assert_eq!(panel.n_rows(), 1);
        assert_eq!(panel.dates[0], date("2021-01-06"));
        assert!((panel.returns[0][0] - 0.21).abs() < 1e-12);
        assert!((panel.returns[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_intersection_reports_ranges() {
        let a = PriceSeries::<f64>::new(
            "A",
            vec![date("2021-01-04"), date("2021-01-05")],
            vec![1.0, 2.0],
        )
        .unwrap();
        let b = PriceSeries::<f64>::new(
            "B",
            vec![date("2022-01-04"), date("2022-01-05")],
            vec![1.0, 2.0],
        )
        .unwrap();
        let err = to_return_panel(&[a, b]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("A:") && msg.contains("B:"), "message was {msg}");
    }

    #[test]
    fn panel_columns_are_lexicographic() {
        let dates = vec![date("2021-01-04"), date("2021-01-05")];
        let z = PriceSeries::<f64>::new("ZZ", dates.clone(), vec![1.0, 2.0]).unwrap();
        let a = PriceSeries::<f64>::new("AA", dates, vec![1.0, 3.0]).unwrap();
        let p1 = to_return_panel(&[z.clone(), a.clone()]).unwrap();
        let p2 = to_return_panel(&[a, z]).unwrap();
        assert_eq!(p1.tickers, vec!["AA", "ZZ"]);
        assert_eq!(p1, p2);
    }

    #[test]
    fn returns_exceed_minus_one() {
        let s = PriceSeries::<f64>::new(
            "X",
            vec![date("2021-01-04"), date("2021-01-05")],
            vec![1e6, 1e-6],
        )
        .unwrap();
        let panel = to_return_panel(&[s]).unwrap();
        assert!(panel.returns[0][0] > -1.0);
    }

    #[test]
    fn risk_free_paper_rates() {
        let rf3m = daily_risk_free(0.042_f64, 252).unwrap();
        assert!((rf3m.daily_rate - 0.042 / 252.0).abs() < 1e-18);
        assert!((rf3m.daily_rate - 1.6667e-4).abs() < 1e-8);
        let rf10y = daily_risk_free(0.046_f64, 252).unwrap();
        assert!((rf10y.daily_rate - 1.8254e-4).abs() < 1e-8);
        // exact reconversion holds for both quoted rates
        assert_eq!(rf3m.daily_rate * 252.0, 0.042);
        assert_eq!(rf10y.daily_rate * 252.0, 0.046);
        assert_eq!(daily_risk_free(0.0_f64, 252).unwrap().daily_rate, 0.0);
    }

    #[test]
    fn risk_free_rejects_zero_days() {
        assert!(matches!(
            daily_risk_free(0.042_f64, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn panel_csv_round_trip_is_byte_stable() {
        let panel = ReturnPanel::<f64> {
            tickers: vec!["A".into(), "B".into()],
            dates: vec![date("2021-01-05"), date("2021-01-06")],
            returns: vec![vec![0.1, -0.033333333333333333], vec![0.0, 1.25e-4]],
        };
        let mut first = Vec::new();
        panel.to_csv(&mut first).unwrap();
        let reread = ReturnPanel::<f64>::from_csv(first.as_slice()).unwrap();
        let mut second = Vec::new();
        reread.to_csv(&mut second).unwrap();
        assert_eq!(first, second);
    }
}
