use std::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRecord {
    pub m: usize,
    pub n: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub experiment: String,
    pub records: Vec<RateRecord>,
    pub fitted_slope: f64,
    pub fit_window: Range<usize>,
}

/// Least-squares slope of `ln error` against `ln max(m, n)` over `window`.
pub fn fit_rate(experiment: &str, records: Vec<RateRecord>, window: Range<usize>) -> Result<RateReport> {
    if window.end > records.len() || window.len() < 3 {
        return Err(Error::Domain(format!(
            "fit window {window:?} needs at least 3 of the {} records",
            records.len()
        )));
    }
    let mut pts = Vec::with_capacity(window.len());
    for r in &records[window.clone()] {
        if !(r.error > 0.0 && r.error.is_finite()) {
            return Err(Error::Data(format!(
                "error {} at ({}, {}) cannot be fitted on a log scale",
                r.error, r.m, r.n
            )));
        }
        pts.push(((r.m.max(r.n) as f64).ln(), r.error.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("all abscissae in the fit window coincide".into()));
    }
    Ok(RateReport {
        experiment: experiment.to_string(),
        records,
        fitted_slope: sxy / sxx,
        fit_window: window,
    })
}
