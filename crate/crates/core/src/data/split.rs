use crate::error::{Error, Result};
use crate::numerics::{Matrix, Rng};

use super::table::Dataset;

#[derive(Debug, Clone)]
pub struct SplitDatasets {
    pub train: Dataset,
    pub val: Option<Dataset>,
    pub test: Option<Dataset>,
}

/// Seeded three-way row split. Test gets floor(n * test_frac), validation
/// floor(n * val_frac), training the remainder; the partition is exact and
/// disjoint.
pub fn split(
    ds: &Dataset,
    train_frac: f64,
    val_frac: f64,
    test_frac: f64,
    seed: u64,
) -> Result<SplitDatasets> {
    for f in [train_frac, val_frac, test_frac] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::Argument(format!("split fraction {f} out of [0, 1]")));
        }
    }
    let sum = train_frac + val_frac + test_frac;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!(
            "split fractions must sum to 1, got {train_frac} + {val_frac} + {test_frac} = {sum}"
        )));
    }
    let n = ds.len();
    let test_n = (n as f64 * test_frac).floor() as usize;
    let val_n = (n as f64 * val_frac).floor() as usize;
    let train_n = n - val_n - test_n;
    if train_n == 0 {
        return Err(Error::Argument(
            "split leaves no training rows".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    Rng::new(seed).shuffle(&mut order);

    let take = |idx: &[usize]| -> Dataset {
        Dataset {
            features: ds.features.take_rows(idx),
            target: ds.target.take_rows(idx),
            target_name: ds.target_name,
        }
    };
    let train = take(&order[..train_n]);
    let val = (val_n > 0).then(|| take(&order[train_n..train_n + val_n]));
    let test = (test_n > 0).then(|| take(&order[train_n + val_n..]));
    Ok(SplitDatasets { train, val, test })
}

impl Dataset {
    /// Sub-dataset from explicit row indices, preserving the given order.
    pub fn take_rows(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::Argument("empty row selection".into()));
        }
        Ok(Dataset {
            features: self.features.take_rows(indices),
            target: self.target.take_rows(indices),
            target_name: self.target_name,
        })
    }

    pub fn from_parts(features: Matrix, target: Matrix, target_name: super::schema::Target) -> Result<Dataset> {
        if features.rows() != target.rows() || target.cols() != 1 {
            return Err(Error::Shape {
                context: "dataset features vs target",
                left_rows: features.rows(),
                left_cols: features.cols(),
                right_rows: target.rows(),
                right_cols: target.cols(),
            });
        }
        Ok(Dataset {
            features,
            target,
            target_name,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::schema::Target;

    fn ds(n: usize) -> Dataset {
        let mut values = Vec::new();
        for r in 0..n {
            for c in 0..16 {
                values.push((r * 16 + c) as f64);
            }
        }
        Dataset {
            features: Matrix::from_vec(n, 16, values).unwrap(),
            target: Matrix::from_vec(n, 1, (0..n).map(|r| r as f64).collect()).unwrap(),
            target_name: Target::PersonTrips,
        }
    }

    #[test]
    fn sizes_exact_floors() {
        let s = split(&ds(10), 0.8, 0.1, 0.1, 1).unwrap();
        assert_eq!(s.train.len(), 8);
        assert_eq!(s.val.unwrap().len(), 1);
        assert_eq!(s.test.unwrap().len(), 1);
    }

    #[test]
    fn all_train_identity() {
        let s = split(&ds(10), 1.0, 0.0, 0.0, 1).unwrap();
        assert_eq!(s.train.len(), 10);
        assert!(s.val.is_none() && s.test.is_none());
    }

    #[test]
    fn deterministic_partition() {
        let a = split(&ds(20), 0.7, 0.2, 0.1, 42).unwrap();
        let b = split(&ds(20), 0.7, 0.2, 0.1, 42).unwrap();
        assert_eq!(a.train.target.values(), b.train.target.values());
        assert_eq!(
            a.test.unwrap().target.values(),
            b.test.unwrap().target.values()
        );
    }

    #[test]
    fn partition_is_disjoint_and_complete() {
        let s = split(&ds(23), 0.7, 0.2, 0.1, 7).unwrap();
        let mut seen: Vec<f64> = s.train.target.values().to_vec();
        seen.extend(s.val.unwrap().target.values());
        seen.extend(s.test.unwrap().target.values());
        seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(seen, (0..23).map(|r| r as f64).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_fraction_sum() {
        assert!(split(&ds(10), 0.5, 0.6, 0.1, 1).is_err());
    }
}
