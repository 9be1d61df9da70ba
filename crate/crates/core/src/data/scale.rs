use crate::error::{Error, Result};
use crate::numerics::Matrix;

use super::schema::{FEATURE_NAMES, N_FEATURES};
use super::table::Dataset;

/// Per-feature z-score parameters. Standard deviation is the population
/// definition (divide by n); fixed so golden values stay stable.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

pub fn fit_scaler(ds: &Dataset) -> Result<ScalerParams> {
    let n = ds.len();
    if n < 2 {
        return Err(Error::Argument(format!(
            "fitting a scaler needs at least 2 rows, got {n}"
        )));
    }
    let mut means = vec![0.0; N_FEATURES];
    let mut stds = vec![0.0; N_FEATURES];
    for c in 0..N_FEATURES {
        let mut sum = 0.0;
        for r in 0..n {
            sum += ds.features.get(r, c);
        }
        let mean = sum / n as f64;
        let mut ss = 0.0;
        for r in 0..n {
            let d = ds.features.get(r, c) - mean;
            ss += d * d;
        }
        let std = (ss / n as f64).sqrt();
        if std == 0.0 {
            return Err(Error::DegenerateFeature {
                column: FEATURE_NAMES[c].to_string(),
            });
        }
        means[c] = mean;
        stds[c] = std;
    }
    Ok(ScalerParams { means, stds })
}

/// (x - mean) / std per feature column; the target is untouched.
pub fn apply_scaler(ds: &Dataset, p: &ScalerParams) -> Result<Dataset> {
    check_len(p)?;
    transform(ds, p, |x, mean, std| (x - mean) / std)
}

/// Inverse transform: x * std + mean.
pub fn inverse_scaler(ds: &Dataset, p: &ScalerParams) -> Result<Dataset> {
    check_len(p)?;
    transform(ds, p, |x, mean, std| x * std + mean)
}

fn check_len(p: &ScalerParams) -> Result<()> {
    if p.means.len() != N_FEATURES || p.stds.len() != N_FEATURES {
        return Err(Error::Schema(format!(
            "scaler has {} means and {} stds, expected {N_FEATURES} of each",
            p.means.len(),
            p.stds.len()
        )));
    }
    Ok(())
}

fn transform(
    ds: &Dataset,
    p: &ScalerParams,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<Dataset> {
    let n = ds.len();
    let mut values = Vec::with_capacity(n * N_FEATURES);
    for r in 0..n {
        for c in 0..N_FEATURES {
            values.push(f(ds.features.get(r, c), p.means[c], p.stds[c]));
        }
    }
    Ok(Dataset {
        features: Matrix::from_vec(n, N_FEATURES, values)?,
        target: ds.target.clone(),
        target_name: ds.target_name,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::Target;

    fn dataset_with_first_col(col: &[f64]) -> Dataset {
        // Remaining columns get distinct nonconstant values.
        let n = col.len();
        let mut values = Vec::new();
        for (r, &v) in col.iter().enumerate() {
            values.push(v);
            for c in 1..N_FEATURES {
                values.push((r * c) as f64 + c as f64 * 0.5);
            }
        }
        Dataset {
            features: Matrix::from_vec(n, N_FEATURES, values).unwrap(),
            target: Matrix::from_vec(n, 1, vec![1.0; n]).unwrap(),
            target_name: Target::PersonTrips,
        }
    }

    #[test]
    fn fit_hand_computed_column() {
        let ds = dataset_with_first_col(&[2.0, 4.0, 6.0]);
        let p = fit_scaler(&ds).unwrap();
        assert!((p.means[0] - 4.0).abs() < 1e-12);
        assert!((p.stds[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fit_symmetric_pair() {
        let ds = dataset_with_first_col(&[-1.0, 1.0]);
        let p = fit_scaler(&ds).unwrap();
        assert_eq!(p.means[0], 0.0);
        assert_eq!(p.stds[0], 1.0);
    }

    #[test]
    fn fit_rejects_constant_column() {
        let ds = dataset_with_first_col(&[5.0, 5.0, 5.0]);
        let e = fit_scaler(&ds).unwrap_err();
        assert!(e.to_string().contains("hh_veh_0"));
    }

    #[test]
    fn apply_hand_computed() {
        let ds = dataset_with_first_col(&[2.0, 4.0, 6.0]);
        let p = fit_scaler(&ds).unwrap();
        let scaled = apply_scaler(&ds, &p).unwrap();
        let expect = [-1.224745, 0.0, 1.224745];
        for (r, &e) in expect.iter().enumerate() {
            assert!((scaled.features.get(r, 0) - e).abs() < 1e-6);
        }
    }

    #[test]
    fn apply_self_fitted_gives_zero_mean_unit_std() {
        let ds = dataset_with_first_col(&[1.0, 3.0, 7.0, 2.0]);
        let p = fit_scaler(&ds).unwrap();
        let scaled = apply_scaler(&ds, &p).unwrap();
        let n = scaled.len();
        for c in 0..N_FEATURES {
            let mean: f64 = (0..n).map(|r| scaled.features.get(r, c)).sum::<f64>() / n as f64;
            let var: f64 = (0..n)
                .map(|r| (scaled.features.get(r, c) - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            assert!(mean.abs() < 1e-9, "col {c} mean {mean}");
            assert!((var.sqrt() - 1.0).abs() < 1e-9, "col {c} std {}", var.sqrt());
        }
    }

    #[test]
    fn round_trip_recovers_inputs() {
        let ds = dataset_with_first_col(&[1.0, 3.0, 7.0, 2.0]);
        let p = fit_scaler(&ds).unwrap();
        let back = inverse_scaler(&apply_scaler(&ds, &p).unwrap(), &p).unwrap();
        for (a, b) in ds.features.values().iter().zip(back.features.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
