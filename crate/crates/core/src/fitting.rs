//! Coherence time from the revival-time signal measured at several delays.
//!
//! At `T = tau` the averaged signal is `amplitude * exp(-2 tau / tau_c)`, which
//! is linear in `tau` after taking logs. The fit is weighted least squares of
//! `ln(signal)` with weights `(signal / se)^2`, the delta-method inverse
//! variance of the log.

use crate::error::{EchoError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub tau: f64,
    pub mean_signal: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCurve {
    pub points: Vec<DecayPoint>,
}

impl DecayCurve {
    pub fn new(points: Vec<DecayPoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].tau <= w[0].tau) {
            return Err(EchoError::config("delays must be strictly increasing"));
        }
        if points.iter().any(|p| !(p.mean_signal >= 0.0)) {
            return Err(EchoError::domain("mean signals must be non-negative"));
        }
        if points.iter().any(|p| !(p.se >= 0.0)) {
            return Err(EchoError::config("standard errors must be non-negative"));
        }
        Ok(DecayCurve { points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceFit {
    /// Fitted coherence time; infinite when no decay is present.
    pub tau_c: f64,
    /// Standard error of `tau_c` (zero for an unweighted fit).
    pub tau_c_se: f64,
    /// Signal extrapolated to `tau = 0`.
    pub amplitude: f64,
    /// Weighted residual norm of the log-linear fit.
    pub residual: f64,
    pub slope: f64,
    /// Standard error of `slope` (zero for an unweighted fit).
    pub slope_se: f64,
    /// No decay: the slope is zero (or positive), so `tau_c` is reported infinite.
    pub zero_slope: bool,
}

impl CoherenceFit {
    /// Whether the decay is resolved: the slope is negative by more than
    /// `z` standard errors.
    pub fn resolves_decay(&self, z: f64) -> bool {
        !self.zero_slope && -self.slope > z * self.slope_se
    }
}

const FLAT_SLOPE: f64 = 1e-12;

pub fn fit_coherence_time(curve: &DecayCurve) -> Result<CoherenceFit> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(EchoError::domain(format!("need at least 3 delays, got {}", pts.len())));
    }
    if pts.iter().any(|p| !(p.mean_signal > 0.0)) {
        return Err(EchoError::domain("log-linear fit needs strictly positive signals"));
    }

    // All-zero errors mean exact data: fall back to equal weights.
    let weighted = pts.iter().any(|p| p.se > 0.0);
    if weighted && pts.iter().any(|p| p.se == 0.0) {
        return Err(EchoError::domain("standard errors must be all zero or all positive"));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.tau).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.mean_signal.ln()).collect();
    let ws: Vec<f64> = pts
        .iter()
        .map(|p| if weighted { (p.mean_signal / p.se).powi(2) } else { 1.0 })
        .collect();

    let sw: f64 = ws.iter().sum();
    let x_bar = ws.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let y_bar = ws.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * (x - x_bar).powi(2)).sum();
    let sxy: f64 = ws
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (x - x_bar) * (y - y_bar))
        .sum();

    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let residual = ws
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        .sqrt();
    let slope_se = if weighted { (1.0 / sxx).sqrt() } else { 0.0 };

    let zero_slope = slope >= -FLAT_SLOPE;
    let (tau_c, tau_c_se) = if zero_slope {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (-2.0 / slope, 2.0 * slope_se / (slope * slope))
    };
    Ok(CoherenceFit { tau_c, tau_c_se, amplitude: intercept.exp(), residual, slope, slope_se, zero_slope })
}
