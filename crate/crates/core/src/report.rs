//! Row types and readers/writers for the CSV and JSON artifacts.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{PinningSet, RenewalSchedule};
use crate::dfs::DfsTrace;
use crate::error::Result;

/// `trace.csv`: `n,x,alpha,vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub x: i32,
    pub alpha: Option<f64>,
    pub vertex: Option<u32>,
}

/// `curve.csv`: `t,h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: f64,
    pub h: f64,
}

/// `renewals.csv`: `i,tau,alpha`. The capped entry has no `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewalRow {
    pub i: usize,
    pub tau: usize,
    pub alpha: Option<f64>,
}

/// `pins.csv`: `k,h,tau_h,zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinRow {
    pub k: usize,
    pub h: usize,
    pub tau_h: usize,
    pub zeta: Option<usize>,
}

pub fn trace_rows(trace: &DfsTrace, alpha: Option<&[f64]>) -> Vec<TraceRow> {
    trace
        .heights()
        .iter()
        .enumerate()
        .map(|(n, &x)| TraceRow { n, x, alpha: alpha.map(|a| a[n]), vertex: trace.walker(n) })
        .collect()
}

pub fn curve_rows(samples: &[(f64, f64)]) -> Vec<CurveRow> {
    samples.iter().map(|&(t, h)| CurveRow { t, h }).collect()
}

pub fn renewal_rows(schedule: &RenewalSchedule, alpha: &[f64]) -> Vec<RenewalRow> {
    schedule
        .tau
        .iter()
        .enumerate()
        .map(|(i, &tau)| RenewalRow { i, tau, alpha: (!schedule.is_degenerate(i)).then(|| alpha[tau]) })
        .collect()
}

pub fn pin_rows(pins: &PinningSet) -> Vec<PinRow> {
    (0..pins.len())
        .map(|idx| PinRow { k: idx + 1, h: pins.h[idx], tau_h: pins.tau_h[idx], zeta: pins.zeta[idx] })
        .collect()
}

pub fn write_csv<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_json_atomic<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    write_json(&tmp, value)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}
