//! Regression metrics.
//!
//! Variances use the population (1/N) convention throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pair(y_true: &[f64], y_pred: &[f64], min_len: usize) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.len() < min_len {
        return Err(Error::TooFewSamples(min_len));
    }
    Ok(())
}

/// Mean anchored at the first element, so a constant slice returns that
/// constant exactly.
fn anchored_mean(xs: &[f64]) -> f64 {
    let anchor = xs[0];
    anchor + xs.iter().map(|x| x - anchor).sum::<f64>() / xs.len() as f64
}

/// Mean squared error.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred, 1)?;
    let sum: f64 = y_true.iter().zip(y_pred).map(|(t, p)| (t - p).powi(2)).sum();
    Ok(sum / y_true.len() as f64)
}

/// Mean absolute error.
pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred, 1)?;
    let sum: f64 = y_true.iter().zip(y_pred).map(|(t, p)| (t - p).abs()).sum();
    Ok(sum / y_true.len() as f64)
}

/// Explained variance score, 1 − Var(y − ŷ)/Var(y).
///
/// The residual variance is accumulated from the centred series,
/// (y_i − ȳ) − (ŷ_i − mean ŷ), so a constant prediction scores exactly 0
/// and a perfect one exactly 1.
pub fn explained_variance(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred, 2)?;
    let n = y_true.len() as f64;
    let mean_t = anchored_mean(y_true);
    let mean_p = anchored_mean(y_pred);
    let (mut var_t, mut var_r) = (0.0, 0.0);
    for (t, p) in y_true.iter().zip(y_pred) {
        let dt = t - mean_t;
        let dr = dt - (p - mean_p);
        var_t += dt * dt;
        var_r += dr * dr;
    }
    var_t /= n;
    var_r /= n;
    if var_t == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(1.0 - var_r / var_t)
}

/// MSE, MAE and EVS of one prediction set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mse: f64,
    pub mae: f64,
    pub evs: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn compute(y_true: &[f64], y_pred: &[f64]) -> Result<Self> {
        Ok(Self {
            mse: mse(y_true, y_pred)?,
            mae: mae(y_true, y_pred)?,
            evs: explained_variance(y_true, y_pred)?,
            n: y_true.len(),
        })
    }
}
