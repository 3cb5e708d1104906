//! Log-log slope fits and CSV/JSON emission of result tables.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{OsmError, Result};
use crate::optimizer::OptimizedChoice;
use crate::pde::SweepRow;
use crate::symbol::{Family, TransmissionParams};

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(OsmError::TooFewPoints {
            needed: 3,
            got: points.len(),
        });
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(OsmError::NonPositive { x, y });
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(OsmError::InvalidParams("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy <= 1e-300 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(SlopeFit {
        exponent: slope,
        intercept,
        r_squared,
        points_used: points.len(),
    })
}

/// `x` with 17 significant digits, trailing zeros dropped (like `%.17g`).
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..17).contains(&exp) {
        trim(&format!("{:.*}", (16 - exp) as usize, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

/// A row that can be written as one CSV record.
pub trait CsvRecord: Serialize + DeserializeOwned {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

impl CsvRecord for SweepRow {
    fn header() -> &'static [&'static str] {
        &["h", "J", "family", "iterations", "contraction", "predicted_rho", "seconds"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            format_real(self.h),
            self.j.to_string(),
            self.family.to_string(),
            self.iterations.to_string(),
            format_real(self.contraction),
            format_real(self.predicted_rho),
            format_real(self.seconds),
        ]
    }
}

/// One sample of a convergence curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: f64,
    pub rho: f64,
    pub rho_hf: f64,
}

impl CsvRecord for SpectrumRow {
    fn header() -> &'static [&'static str] {
        &["k", "rho", "rho_hf"]
    }

    fn fields(&self) -> Vec<String> {
        vec![format_real(self.k), format_real(self.rho), format_real(self.rho_hf)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "K_J")]
    pub k_j: f64,
    #[serde(rename = "K_inf")]
    pub k_inf: f64,
}

impl CsvRecord for ConstantRow {
    fn header() -> &'static [&'static str] {
        &["J", "K_J", "K_inf"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.j.to_string(), format_real(self.k_j), format_real(self.k_inf)]
    }
}

/// A local maximum of the convergence curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub k: f64,
    pub rho: f64,
}

/// JSON form of an optimization result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeRecord {
    pub family: Family,
    pub scope: String,
    pub delta: f64,
    pub params: TransmissionParams,
    pub predicted_rho: f64,
    pub numeric_rho: Option<f64>,
    pub constant: f64,
    pub maxima: Vec<Maximum>,
}

impl From<&OptimizedChoice> for OptimizeRecord {
    fn from(c: &OptimizedChoice) -> Self {
        Self {
            family: c.family,
            scope: c.scope.label(),
            delta: c.delta,
            params: c.params,
            predicted_rho: c.predicted_rho,
            numeric_rho: c.numeric_rho,
            constant: c.constant_used,
            maxima: c.maxima.iter().map(|&(k, rho)| Maximum { k, rho }).collect(),
        }
    }
}

pub fn write_csv<T: CsvRecord, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(T::header())?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<T: CsvRecord>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv<T: CsvRecord, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != T::header() {
        return Err(OsmError::InvalidParams(format!(
            "unexpected CSV header {header:?}, want {:?}",
            T::header()
        )));
    }
    r.deserialize().map(|row| row.map_err(OsmError::from)).collect()
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned, R: Read>(input: R) -> Result<T> {
    Ok(serde_json::from_reader(input)?)
}
