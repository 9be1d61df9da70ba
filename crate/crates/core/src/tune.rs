//! Grid search with k-fold cross-validation over batch size and epochs.
//!
//! The CV score is validation MSE (the training objective); MAPE stays a
//! reporting metric only.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::forward;
use crate::numerics::Rng;
use crate::train::{mse_loss, train, TrainConfig};

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub batch_sizes: Vec<usize>,
    pub epochs_list: Vec<usize>,
    pub folds: usize,
    /// Supplies learning rate and base seed; its own batch/epochs are ignored.
    pub base: TrainConfig,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [("batch", &self.batch_sizes), ("epochs", &self.epochs_list)] {
            if list.is_empty() {
                return Err(Error::Argument(format!("grid list '{name}' is empty")));
            }
            if list.contains(&0) {
                return Err(Error::Argument(format!(
                    "grid list '{name}' entries must be at least 1"
                )));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != list.len() {
                return Err(Error::Argument(format!(
                    "grid list '{name}' contains duplicates"
                )));
            }
        }
        if self.folds < 2 {
            return Err(Error::Argument("folds must be at least 2".into()));
        }
        Ok(())
    }
}

/// Parses the CLI grid grammar: semicolon-separated `name=value[,value...]`
/// pairs with names `batch` and `epochs`, e.g. `batch=10,20;epochs=5,10,50`.
pub fn parse_grid(s: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut batch = None;
    let mut epochs = None;
    for part in s.split(';') {
        let (name, values) = part.split_once('=').ok_or_else(|| {
            Error::Argument(format!(
                "malformed grid '{s}': expected name=value[,value...] pairs separated by ';' with names 'batch' and 'epochs'"
            ))
        })?;
        let parsed: Vec<usize> = values
            .split(',')
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| {
                    Error::Argument(format!("grid value '{v}' in '{part}' is not a count"))
                })
            })
            .collect::<Result<_>>()?;
        match name.trim() {
            "batch" => batch = Some(parsed),
            "epochs" => epochs = Some(parsed),
            other => {
                return Err(Error::Argument(format!(
                    "unknown grid name '{other}'; expected 'batch' or 'epochs'"
                )))
            }
        }
    }
    match (batch, epochs) {
        (Some(b), Some(e)) => Ok((b, e)),
        _ => Err(Error::Argument(format!(
            "grid '{s}' must define both 'batch' and 'epochs'"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct GridCell {
    pub batch_size: usize,
    pub epochs: usize,
    pub fold_losses: Vec<f64>,
    pub mean_cv_loss: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    /// Row-major over (batch_sizes x epochs_list).
    pub cells: Vec<GridCell>,
    pub best_config: TrainConfig,
    pub best_mean_cv_loss: f64,
}

/// Seeded fold assignment: fold sizes differ by at most one and partition
/// 0..n.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Argument("k must be at least 2".into()));
    }
    if n < k {
        return Err(Error::Argument(format!(
            "cannot make {k} folds from {n} rows"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    Rng::new(seed).shuffle(&mut order);
    let base = n / k;
    let remainder = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < remainder);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

/// Fold seed derived from the cell's hyperparameters (not its position), so
/// an identical (batch, epochs) cell appearing twice scores identically and
/// the earliest-cell tie break is meaningful.
fn fold_seed(base_seed: u64, batch_size: usize, epochs: usize, fold: usize) -> u64 {
    let s = Rng::derive_seed(base_seed, batch_size as u64);
    let s = Rng::derive_seed(s, epochs as u64);
    Rng::derive_seed(s, fold as u64)
}

/// Scores an explicit list of (batch_size, epochs) cells over shared folds.
/// A fold that diverges marks its whole cell as infinite rather than
/// aborting the sweep.
pub fn score_cells(
    ds: &Dataset,
    cells: &[(usize, usize)],
    folds: usize,
    base: &TrainConfig,
) -> Result<Vec<GridCell>> {
    let fold_sets = kfold_indices(ds.len(), folds, Rng::derive_seed(base.seed, 0x6b66))?;
    let mut scored = Vec::with_capacity(cells.len());
    for &(batch_size, epochs) in cells {
        let mut fold_losses = Vec::with_capacity(folds);
        let mut diverged = false;
        for (fi, holdout) in fold_sets.iter().enumerate() {
            let train_idx: Vec<usize> = fold_sets
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != fi)
                .flat_map(|(_, f)| f.iter().copied())
                .collect();
            let train_ds = ds.take_rows(&train_idx)?;
            let holdout_ds = ds.take_rows(holdout)?;
            let config = TrainConfig {
                batch_size,
                epochs,
                learning_rate: base.learning_rate,
                seed: fold_seed(base.seed, batch_size, epochs, fi),
                validation_fraction: 0.0,
            };
            // Scaler already applied by the caller; the bundled params are
            // irrelevant for fold scoring.
            let loss = match train(&train_ds, &identity_scaler(), &config) {
                Ok(model) => {
                    let (pred, _) = forward(&model.network, &holdout_ds.features)?;
                    let (loss, _) = mse_loss(&pred, &holdout_ds.target)?;
                    loss
                }
                Err(Error::Divergence { .. }) => f64::INFINITY,
                Err(other) => return Err(other),
            };
            if !loss.is_finite() {
                diverged = true;
            }
            fold_losses.push(loss);
        }
        let mean_cv_loss = if diverged {
            f64::INFINITY
        } else {
            fold_losses.iter().sum::<f64>() / fold_losses.len() as f64
        };
        scored.push(GridCell {
            batch_size,
            epochs,
            fold_losses,
            mean_cv_loss,
            diverged,
        });
    }
    Ok(scored)
}

/// Index of the cell with the lowest mean CV loss; ties break toward the
/// earliest cell.
pub fn select_best(cells: &[GridCell]) -> Result<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.mean_cv_loss.is_finite())
        .min_by(|(ia, a), (ib, b)| {
            a.mean_cv_loss
                .partial_cmp(&b.mean_cv_loss)
                .unwrap()
                .then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .ok_or(Error::AllCellsDiverged)
}

/// Exhaustive search over the grid, row-major over
/// (batch_sizes x epochs_list).
pub fn grid_search(ds: &Dataset, grid: &GridSpec) -> Result<TuneResult> {
    grid.validate()?;
    let cell_list: Vec<(usize, usize)> = grid
        .batch_sizes
        .iter()
        .flat_map(|&b| grid.epochs_list.iter().map(move |&e| (b, e)))
        .collect();
    let cells = score_cells(ds, &cell_list, grid.folds, &grid.base)?;
    let best = cells[select_best(&cells)?].clone();
    Ok(TuneResult {
        best_config: TrainConfig {
            batch_size: best.batch_size,
            epochs: best.epochs,
            ..grid.base.clone()
        },
        best_mean_cv_loss: best.mean_cv_loss,
        cells,
    })
}

fn identity_scaler() -> crate::data::ScalerParams {
    crate::data::ScalerParams {
        means: vec![0.0; crate::data::N_FEATURES],
        stds: vec![1.0; crate::data::N_FEATURES],
    }
}
