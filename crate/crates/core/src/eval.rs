//! MAPE evaluation, accuracy reporting, and plot-ready actual-vs-predicted
//! exports.
//!
//! Accuracy is reported as 100 - MAPE. That is a reporting convention for
//! regression error, not a classification accuracy.

use std::io::Write;

use crate::data::{apply_scaler, Dataset};
use crate::error::{Error, Result};
use crate::nn::forward;
use crate::train::TrainedModel;

/// What to do when an actual value is exactly zero (the percentage error is
/// undefined there). Error is the default: silent exclusion must be opted
/// into, and the excluded count is always reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroPolicy {
    Error,
    Exclude,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    /// Pairs actually included in the MAPE.
    pub n: usize,
    pub mape_percent: f64,
    pub accuracy_percent: f64,
    /// All (actual, forecast) pairs in input order, including excluded ones.
    pub pairs: Vec<(f64, f64)>,
    pub excluded_zero_actuals: usize,
}

impl EvalReport {
    /// One-line summary for script consumption.
    pub fn summary(&self) -> String {
        format!(
            "mape={} accuracy={} n={} excluded={}",
            self.mape_percent, self.accuracy_percent, self.n, self.excluded_zero_actuals
        )
    }
}

/// Mean absolute percentage error: (100/n) * sum |A_t - F_t| / |A_t|.
pub fn mape(actual: &[f64], forecast: &[f64], zero_policy: ZeroPolicy) -> Result<EvalReport> {
    if actual.len() != forecast.len() || actual.is_empty() {
        return Err(Error::Shape {
            context: "mape operand lengths",
            left_rows: actual.len(),
            left_cols: 1,
            right_rows: forecast.len(),
            right_cols: 1,
        });
    }
    let mut sum = 0.0;
    let mut included = 0usize;
    let mut excluded = 0usize;
    for (t, (&a, &f)) in actual.iter().zip(forecast).enumerate() {
        if a == 0.0 {
            match zero_policy {
                ZeroPolicy::Error => return Err(Error::ZeroActual { index: t }),
                ZeroPolicy::Exclude => {
                    excluded += 1;
                    continue;
                }
            }
        }
        sum += (a - f).abs() / a.abs();
        included += 1;
    }
    if included == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let mape_percent = 100.0 * sum / included as f64;
    Ok(EvalReport {
        n: included,
        mape_percent,
        accuracy_percent: 100.0 - mape_percent,
        pairs: actual.iter().copied().zip(forecast.iter().copied()).collect(),
        excluded_zero_actuals: excluded,
    })
}

/// Applies the model's stored scaler to the (unscaled) dataset features,
/// runs the forward pass, and scores MAPE against the dataset target.
pub fn evaluate_model(
    model: &TrainedModel,
    ds: &Dataset,
    zero_policy: ZeroPolicy,
) -> Result<EvalReport> {
    if ds.features.cols() != model.network.input_width() {
        return Err(Error::Schema(format!(
            "dataset has {} feature columns, model expects {}",
            ds.features.cols(),
            model.network.input_width()
        )));
    }
    let scaled = apply_scaler(ds, &model.scaler)?;
    let (pred, _) = forward(&model.network, &scaled.features)?;
    mape(ds.target.values(), pred.values(), zero_policy)
}

/// Writes `index,actual,predicted` CSV rows in evaluation input order.
pub fn export_pairs(report: &EvalReport, mut dest: impl Write) -> std::io::Result<()> {
    writeln!(dest, "index,actual,predicted")?;
    for (i, (a, f)) in report.pairs.iter().enumerate() {
        writeln!(dest, "{i},{a},{f}")?;
    }
    Ok(())
}
