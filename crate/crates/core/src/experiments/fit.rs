use serde::Serialize;

use crate::error::{param_err, Result};

/// Least-squares line `y = slope x + intercept` with its coefficient of determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 2 {
        return param_err("a line fit needs at least two points");
    }
    if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return param_err("fit points must be finite");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return param_err("a line fit needs at least two distinct abscissae");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_res == 0.0 || ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(Fit { slope, intercept, r2 })
}

/// Least squares on `(x, log2 y)`; needs at least three points with `y > 0`.
pub fn fit_log2_slope(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return param_err("a growth fit needs at least three points");
    }
    if let Some(&(_, y)) = points.iter().find(|&&(_, y)| !(y > 0.0)) {
        return param_err(format!("growth fits need positive values, got {y}"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x, y.log2())).collect();
    fit_linear(&logs)
}
