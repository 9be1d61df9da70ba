//! Durable, versioned model serialization: a single JSON document holding the
//! network, scaler, schema, and training metadata. Loading is the trust
//! boundary: every structural invariant is re-checked.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{ScalerParams, Target};
use crate::error::{Error, Result};
use crate::nn::{Activation, DenseLayer, Network};
use crate::numerics::Matrix;
use crate::train::{LossCurve, TrainConfig, TrainedModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct LayerDoc {
    fan_in: usize,
    fan_out: usize,
    activation: String,
    weights: Vec<f64>, // row-major fan_in x fan_out
    bias: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScalerDoc {
    means: Vec<f64>,
    stds: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TrainConfigDoc {
    batch_size: usize,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
    validation_fraction: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    layers: Vec<LayerDoc>,
    scaler: ScalerDoc,
    features: Vec<String>,
    target: String,
    train_config: TrainConfigDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    created_at: Option<String>,
}

fn to_document(model: &TrainedModel, created_at: Option<String>) -> ModelDocument {
    ModelDocument {
        schema_version: SCHEMA_VERSION,
        layers: model
            .network
            .layers
            .iter()
            .map(|l| LayerDoc {
                fan_in: l.fan_in(),
                fan_out: l.fan_out(),
                activation: l.activation.name().to_string(),
                weights: l.weights.values().to_vec(),
                bias: l.bias.values().to_vec(),
            })
            .collect(),
        scaler: ScalerDoc {
            means: model.scaler.means.clone(),
            stds: model.scaler.stds.clone(),
        },
        features: model.feature_names.clone(),
        target: model.target_name.name().to_string(),
        train_config: TrainConfigDoc {
            batch_size: model.config.batch_size,
            epochs: model.config.epochs,
            learning_rate: model.config.learning_rate,
            seed: model.config.seed,
            validation_fraction: model.config.validation_fraction,
        },
        created_at,
    }
}

/// Serializes the model to JSON text. With `include_timestamp` off the
/// output is byte-deterministic for a given model.
pub fn render(model: &TrainedModel, include_timestamp: bool) -> String {
    let created_at = include_timestamp.then(now_rfc3339);
    let doc = to_document(model, created_at);
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

fn now_rfc3339() -> String {
    // Seconds-resolution UTC timestamp from the system clock.
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    // Civil-from-days conversion (Howard Hinnant's algorithm).
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (h, m, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = if month <= 2 { y + 1 } else { y };
    format!("{year:04}-{month:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}

pub fn save(model: &TrainedModel, path: &Path, include_timestamp: bool) -> Result<()> {
    crate::util::write_atomic(path, render(model, include_timestamp).as_bytes())
}

/// Parses and validates a model document.
pub fn load_from_str(text: &str) -> Result<TrainedModel> {
    let doc: ModelDocument = serde_json::from_str(text)
        .map_err(|e| Error::Corrupt(format!("not a valid model document: {e}")))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Version {
            found: doc.schema_version,
            supported: SCHEMA_VERSION,
        });
    }
    if doc.layers.is_empty() {
        return Err(Error::Corrupt("layers: empty layer list".into()));
    }
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (i, layer) in doc.layers.iter().enumerate() {
        let activation = Activation::from_name(&layer.activation).ok_or_else(|| {
            Error::Corrupt(format!(
                "layers[{i}].activation: unknown tag '{}'",
                layer.activation
            ))
        })?;
        if layer.weights.len() != layer.fan_in * layer.fan_out {
            return Err(Error::Corrupt(format!(
                "layers[{i}].weights: expected {} values for {}x{}, got {}",
                layer.fan_in * layer.fan_out,
                layer.fan_in,
                layer.fan_out,
                layer.weights.len()
            )));
        }
        if layer.bias.len() != layer.fan_out {
            return Err(Error::Corrupt(format!(
                "layers[{i}].bias: expected {} values, got {}",
                layer.fan_out,
                layer.bias.len()
            )));
        }
        if i > 0 && doc.layers[i - 1].fan_out != layer.fan_in {
            return Err(Error::Corrupt(format!(
                "layers[{i}].fan_in: {} does not chain with previous fan_out {}",
                layer.fan_in,
                doc.layers[i - 1].fan_out
            )));
        }
        if layer.weights.iter().chain(&layer.bias).any(|v| !v.is_finite()) {
            return Err(Error::Corrupt(format!("layers[{i}]: non-finite parameter")));
        }
        layers.push(DenseLayer {
            weights: Matrix::from_vec(layer.fan_in, layer.fan_out, layer.weights.clone())?,
            bias: Matrix::from_vec(1, layer.fan_out, layer.bias.clone())?,
            activation,
        });
    }
    let input_width = layers[0].fan_in();
    if doc.scaler.means.len() != input_width || doc.scaler.stds.len() != input_width {
        return Err(Error::Corrupt(format!(
            "scaler: {} means / {} stds do not match input width {}",
            doc.scaler.means.len(),
            doc.scaler.stds.len(),
            input_width
        )));
    }
    if doc.scaler.stds.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Corrupt("scaler.stds: entries must be positive".into()));
    }
    if doc.features.len() != input_width {
        return Err(Error::Corrupt(format!(
            "features: {} names do not match input width {}",
            doc.features.len(),
            input_width
        )));
    }
    let target_name = Target::parse(&doc.target)
        .map_err(|_| Error::Corrupt(format!("target: unknown name '{}'", doc.target)))?;
    Ok(TrainedModel {
        network: Network { layers },
        scaler: ScalerParams {
            means: doc.scaler.means,
            stds: doc.scaler.stds,
        },
        feature_names: doc.features,
        target_name,
        curve: LossCurve {
            train_loss: Vec::new(),
            val_loss: Vec::new(),
        },
        config: TrainConfig {
            batch_size: doc.train_config.batch_size,
            epochs: doc.train_config.epochs,
            learning_rate: doc.train_config.learning_rate,
            seed: doc.train_config.seed,
            validation_fraction: doc.train_config.validation_fraction,
        },
    })
}

pub fn load(path: &Path) -> Result<TrainedModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    load_from_str(&text)
}
