//! Loss, optimizer, minibatch training loop, and loss-curve capture.

use crate::data::{Dataset, ScalerParams, Target};
use crate::error::{Error, Result};
use crate::nn::{backward, forward, init_network, paper_architecture, Gradients, Network};
use crate::numerics::{Matrix, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Fraction of rows split off for per-epoch validation loss; 0 disables.
    pub validation_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 20,
            epochs: 5,
            learning_rate: 0.001,
            seed: 1,
            validation_fraction: 0.2,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Argument("batch_size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Argument("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Argument(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Argument(format!(
                "validation_fraction must be in [0, 1), got {}",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

/// Per-epoch training and validation losses. val_loss is empty when no
/// validation rows exist.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
}

/// Everything prediction needs, bundled.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub network: Network,
    pub scaler: ScalerParams,
    pub feature_names: Vec<String>,
    pub target_name: Target,
    pub curve: LossCurve,
    pub config: TrainConfig,
}

/// Mean squared error and its gradient with respect to the predictions.
pub fn mse_loss(pred: &Matrix, actual: &Matrix) -> Result<(f64, Matrix)> {
    if pred.rows() != actual.rows() || pred.cols() != 1 || actual.cols() != 1 {
        return Err(Error::Shape {
            context: "mse loss operands",
            left_rows: pred.rows(),
            left_cols: pred.cols(),
            right_rows: actual.rows(),
            right_cols: actual.cols(),
        });
    }
    let n = pred.rows() as f64;
    let diff = pred.sub(actual)?;
    let loss = diff.values().iter().map(|d| d * d).sum::<f64>() / n;
    Ok((loss, diff.scale(2.0 / n)))
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// First and second moment estimates, shape-congruent with the network.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_weights: Vec<Matrix>,
    v_weights: Vec<Matrix>,
    m_bias: Vec<Matrix>,
    v_bias: Vec<Matrix>,
    step: usize,
}

impl AdamState {
    pub fn new(net: &Network) -> Self {
        let zeros_like_w: Vec<Matrix> = net
            .layers
            .iter()
            .map(|l| Matrix::zeros(l.fan_in(), l.fan_out()))
            .collect();
        let zeros_like_b: Vec<Matrix> = net
            .layers
            .iter()
            .map(|l| Matrix::zeros(1, l.fan_out()))
            .collect();
        AdamState {
            m_weights: zeros_like_w.clone(),
            v_weights: zeros_like_w,
            m_bias: zeros_like_b.clone(),
            v_bias: zeros_like_b,
            step: 0,
        }
    }

    pub fn step(&self) -> usize {
        self.step
    }
}

fn adam_update(
    param: &Matrix,
    grad: &Matrix,
    m: &mut Matrix,
    v: &mut Matrix,
    lr: f64,
    t: usize,
) -> Matrix {
    let t = t as i32;
    let m_new = m.scale(BETA1).add(&grad.scale(1.0 - BETA1)).unwrap();
    let v_new = v
        .scale(BETA2)
        .add(&grad.hadamard(grad).unwrap().scale(1.0 - BETA2))
        .unwrap();
    let m_hat = m_new.scale(1.0 / (1.0 - BETA1.powi(t)));
    let v_hat = v_new.scale(1.0 / (1.0 - BETA2.powi(t)));
    let delta: Vec<f64> = m_hat
        .values()
        .iter()
        .zip(v_hat.values())
        .map(|(&mh, &vh)| lr * mh / (vh.sqrt() + EPSILON))
        .collect();
    *m = m_new;
    *v = v_new;
    let updated: Vec<f64> = param
        .values()
        .iter()
        .zip(&delta)
        .map(|(&p, &d)| p - d)
        .collect();
    Matrix::from_vec(param.rows(), param.cols(), updated).unwrap()
}

/// One Adam step (beta1=0.9, beta2=0.999, eps=1e-8, bias correction).
/// Returns the updated network; the moment state advances in place.
pub fn adam_step(
    net: &Network,
    grads: &Gradients,
    state: &mut AdamState,
    lr: f64,
) -> Result<Network> {
    if grads.d_weights.len() != net.layers.len() {
        return Err(Error::Argument(format!(
            "gradient depth {} does not match network depth {}",
            grads.d_weights.len(),
            net.layers.len()
        )));
    }
    for (l, layer) in net.layers.iter().enumerate() {
        let dw = &grads.d_weights[l];
        if dw.rows() != layer.fan_in() || dw.cols() != layer.fan_out() {
            return Err(Error::Shape {
                context: "adam weight gradient",
                left_rows: dw.rows(),
                left_cols: dw.cols(),
                right_rows: layer.fan_in(),
                right_cols: layer.fan_out(),
            });
        }
    }
    state.step += 1;
    let t = state.step;
    let layers = net
        .layers
        .iter()
        .enumerate()
        .map(|(l, layer)| crate::nn::DenseLayer {
            weights: adam_update(
                &layer.weights,
                &grads.d_weights[l],
                &mut state.m_weights[l],
                &mut state.v_weights[l],
                lr,
                t,
            ),
            bias: adam_update(
                &layer.bias,
                &grads.d_bias[l],
                &mut state.m_bias[l],
                &mut state.v_bias[l],
                lr,
                t,
            ),
            activation: layer.activation,
        })
        .collect();
    Ok(Network { layers })
}

/// Trains the fixed three-layer architecture on an already-scaled dataset,
/// splitting off `validation_fraction` of the rows (seeded) for the per-epoch
/// validation loss. The loss operates on the target in its original units.
/// Deterministic for a given (dataset, config).
pub fn train(dataset: &Dataset, scaler: &ScalerParams, config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }

    let n = dataset.len();
    let val_n = (n as f64 * config.validation_fraction).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    Rng::new(Rng::derive_seed(config.seed, 1)).shuffle(&mut order);
    let (train_idx, val_idx) = order.split_at(n - val_n);
    if train_idx.is_empty() {
        return Err(Error::Argument(
            "validation split leaves no training rows".into(),
        ));
    }
    let train_ds = Dataset {
        features: dataset.features.take_rows(train_idx),
        target: dataset.target.take_rows(train_idx),
        target_name: dataset.target_name,
    };
    let val_ds = (val_n > 0).then(|| Dataset {
        features: dataset.features.take_rows(val_idx),
        target: dataset.target.take_rows(val_idx),
        target_name: dataset.target_name,
    });
    train_with_validation(&train_ds, val_ds.as_ref(), scaler, config)
}

/// Training loop against an explicitly supplied validation set (or none).
/// `config.validation_fraction` is ignored here; the CLI uses this when the
/// validation rows come from the dataset-level split instead.
pub fn train_with_validation(
    dataset: &Dataset,
    validation: Option<&Dataset>,
    scaler: &ScalerParams,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Argument("cannot train on an empty dataset".into()));
    }

    // Independent derived streams: weight init and epoch shuffles.
    let mut init_rng = Rng::new(Rng::derive_seed(config.seed, 0));
    let mut shuffle_rng = Rng::new(Rng::derive_seed(config.seed, 2));

    let val_set = validation.map(|v| (v.features.clone(), v.target.clone()));

    let arch = paper_architecture(dataset.features.cols())?;
    let mut net = init_network(&arch, &mut init_rng);
    let mut adam = AdamState::new(&net);

    let mut train_loss = Vec::with_capacity(config.epochs);
    let mut val_loss = Vec::with_capacity(config.epochs);
    let mut epoch_order: Vec<usize> = (0..dataset.len()).collect();
    for epoch in 0..config.epochs {
        shuffle_rng.shuffle(&mut epoch_order);
        let mut weighted = 0.0;
        for (batch_no, batch_idx) in epoch_order.chunks(config.batch_size).enumerate() {
            let x = dataset.features.take_rows(batch_idx);
            let y = dataset.target.take_rows(batch_idx);
            let (pred, cache) = forward(&net, &x)?;
            let (loss, d_pred) = mse_loss(&pred, &y)?;
            if !loss.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    batch: batch_no,
                });
            }
            weighted += loss * batch_idx.len() as f64;
            let grads = backward(&net, &cache, &d_pred)?;
            net = adam_step(&net, &grads, &mut adam, config.learning_rate)?;
        }
        train_loss.push(weighted / epoch_order.len() as f64);
        if let Some((vx, vy)) = &val_set {
            let (pred, _) = forward(&net, vx)?;
            let (loss, _) = mse_loss(&pred, vy)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, batch: 0 });
            }
            val_loss.push(loss);
        }
    }

    Ok(TrainedModel {
        network: net,
        scaler: scaler.clone(),
        feature_names: crate::data::FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        target_name: dataset.target_name,
        curve: LossCurve {
            train_loss,
            val_loss,
        },
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{apply_scaler, assemble, clean, fit_scaler, synthesize, Target};

    fn scaled_synthetic(n: usize, seed: u64) -> (Dataset, ScalerParams) {
        let raw = synthesize(n, seed, 0.02).unwrap();
        let (rows, _) = clean(&raw).unwrap();
        let ds = assemble(&rows, Target::PersonTrips).unwrap();
        let scaler = fit_scaler(&ds).unwrap();
        (apply_scaler(&ds, &scaler).unwrap(), scaler)
    }

    #[test]
    fn mse_basics() {
        let p = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        let a = Matrix::from_vec(2, 1, vec![0.0, 0.0]).unwrap();
        let (loss, grad) = mse_loss(&p, &a).unwrap();
        assert_eq!(loss, 5.0);
        assert_eq!(grad.values(), &[1.0, 3.0]);

        let (loss0, grad0) = mse_loss(&p, &p).unwrap();
        assert_eq!(loss0, 0.0);
        assert!(grad0.values().iter().all(|&g| g == 0.0));

        let p1 = Matrix::from_vec(1, 1, vec![2.0]).unwrap();
        let a1 = Matrix::from_vec(1, 1, vec![0.0]).unwrap();
        let (l1, g1) = mse_loss(&p1, &a1).unwrap();
        assert_eq!(l1, 4.0);
        assert_eq!(g1.values(), &[4.0]);
    }

    #[test]
    fn mse_shape_mismatch() {
        let p = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        let a = Matrix::from_vec(3, 1, vec![0.0; 3]).unwrap();
        assert!(mse_loss(&p, &a).is_err());
    }

    fn scalar_net(w: f64) -> Network {
        Network {
            layers: vec![crate::nn::DenseLayer {
                weights: Matrix::from_vec(1, 1, vec![w]).unwrap(),
                bias: Matrix::zeros(1, 1),
                activation: crate::nn::Activation::Identity,
            }],
        }
    }

    fn scalar_grads(g: f64) -> Gradients {
        Gradients {
            d_weights: vec![Matrix::from_vec(1, 1, vec![g]).unwrap()],
            d_bias: vec![Matrix::zeros(1, 1)],
        }
    }

    #[test]
    fn adam_zero_gradient_leaves_network_unchanged() {
        let net = scalar_net(0.7);
        let mut state = AdamState::new(&net);
        let updated = adam_step(&net, &scalar_grads(0.0), &mut state, 0.001).unwrap();
        assert_eq!(updated.layers[0].weights.values(), &[0.7]);
    }

    #[test]
    fn adam_first_step_magnitude_near_lr() {
        // Hand evaluation at t=1: m_hat = g, v_hat = g^2, so
        // delta = lr * g / (|g| + eps) ~= lr for g = 1.
        let net = scalar_net(0.0);
        let mut state = AdamState::new(&net);
        let updated = adam_step(&net, &scalar_grads(1.0), &mut state, 0.001).unwrap();
        let delta = updated.layers[0].weights.values()[0].abs();
        assert!((delta - 0.001).abs() < 1e-9, "delta {delta}");
    }

    #[test]
    fn adam_constant_gradient_step_does_not_grow() {
        let net = scalar_net(0.0);
        let mut state = AdamState::new(&net);
        let step1 = adam_step(&net, &scalar_grads(0.5), &mut state, 0.001).unwrap();
        let d1 = (step1.layers[0].weights.values()[0] - 0.0).abs();
        let step2 = adam_step(&step1, &scalar_grads(0.5), &mut state, 0.001).unwrap();
        let d2 = (step2.layers[0].weights.values()[0] - step1.layers[0].weights.values()[0]).abs();
        assert!(d2 <= d1 * 1.01, "d1 {d1}, d2 {d2}");
    }

    #[test]
    fn adam_shape_mismatch_rejected() {
        let net = scalar_net(0.0);
        let mut state = AdamState::new(&net);
        let bad = Gradients {
            d_weights: vec![Matrix::zeros(2, 1)],
            d_bias: vec![Matrix::zeros(1, 1)],
        };
        assert!(adam_step(&net, &bad, &mut state, 0.001).is_err());
    }

    #[test]
    fn curve_length_matches_epochs() {
        let (ds, scaler) = scaled_synthetic(200, 4);
        let config = TrainConfig {
            epochs: 5,
            ..Default::default()
        };
        let model = train(&ds, &scaler, &config).unwrap();
        assert_eq!(model.curve.train_loss.len(), 5);
        assert_eq!(model.curve.val_loss.len(), 5);
        assert!(model.curve.train_loss.iter().all(|&l| l.is_finite() && l >= 0.0));
    }

    #[test]
    fn constant_target_loss_decreases() {
        let (mut ds, scaler) = scaled_synthetic(100, 8);
        ds.target = Matrix::from_vec(ds.len(), 1, vec![3.0; ds.len()]).unwrap();
        let config = TrainConfig {
            epochs: 10,
            ..Default::default()
        };
        let model = train(&ds, &scaler, &config).unwrap();
        assert!(model.curve.train_loss.last().unwrap() < model.curve.train_loss.first().unwrap());
    }

    #[test]
    fn synthetic_halves_first_epoch_loss() {
        let (ds, scaler) = scaled_synthetic(500, 12);
        let config = TrainConfig {
            epochs: 20,
            ..Default::default()
        };
        let model = train(&ds, &scaler, &config).unwrap();
        let first = model.curve.train_loss[0];
        let last = *model.curve.train_loss.last().unwrap();
        assert!(last < 0.5 * first, "first {first}, last {last}");
    }

    #[test]
    fn deterministic_given_config() {
        let (ds, scaler) = scaled_synthetic(150, 2);
        let config = TrainConfig::default();
        let a = train(&ds, &scaler, &config).unwrap();
        let b = train(&ds, &scaler, &config).unwrap();
        assert_eq!(a.curve.train_loss, b.curve.train_loss);
        for (la, lb) in a.network.layers.iter().zip(&b.network.layers) {
            assert_eq!(la.weights.values(), lb.weights.values());
        }
    }

    #[test]
    fn validation_rows_do_not_influence_weights() {
        let (ds, scaler) = scaled_synthetic(100, 6);
        let config = TrainConfig {
            epochs: 3,
            ..Default::default()
        };
        let baseline = train(&ds, &scaler, &config).unwrap();

        // Perturb exactly the rows the seeded split sends to validation.
        let n = ds.len();
        let val_n = (n as f64 * config.validation_fraction).floor() as usize;
        let mut order: Vec<usize> = (0..n).collect();
        Rng::new(Rng::derive_seed(config.seed, 1)).shuffle(&mut order);
        let val_rows: Vec<usize> = order[n - val_n..].to_vec();

        let mut targets = ds.target.values().to_vec();
        for &r in &val_rows {
            targets[r] += 1000.0;
        }
        let perturbed = Dataset::from_parts(
            ds.features.clone(),
            Matrix::from_vec(n, 1, targets).unwrap(),
            ds.target_name,
        )
        .unwrap();
        let shifted = train(&perturbed, &scaler, &config).unwrap();
        for (la, lb) in baseline.network.layers.iter().zip(&shifted.network.layers) {
            assert_eq!(la.weights.values(), lb.weights.values());
            assert_eq!(la.bias.values(), lb.bias.values());
        }
        assert_ne!(baseline.curve.val_loss, shifted.curve.val_loss);
    }

    #[test]
    fn empty_dataset_rejected() {
        let (ds, scaler) = scaled_synthetic(10, 1);
        let bad = TrainConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(train(&ds, &scaler, &bad).is_err());
    }
}
