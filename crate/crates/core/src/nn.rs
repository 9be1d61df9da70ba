//! Dense layers, activations, forward pass with cached intermediates, and
//! backpropagation.
//!
//! Batch-major layout throughout: rows are samples, columns are features.

use crate::error::{Error, Result};
use crate::numerics::{add_row_broadcast, matmul, Matrix, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, z: &Matrix) -> Matrix {
        match self {
            Activation::Relu => z.map(|v| v.max(0.0)),
            Activation::Tanh => z.map(f64::tanh),
            Activation::Identity => z.clone(),
        }
    }

    /// Derivative evaluated at the pre-activation z.
    /// ReLU' at exactly 0 is defined as 0.
    pub fn grad(self, z: &Matrix) -> Matrix {
        match self {
            Activation::Relu => z.map(|v| if v > 0.0 { 1.0 } else { 0.0 }),
            Activation::Tanh => z.map(|v| {
                let t = v.tanh();
                1.0 - t * t
            }),
            Activation::Identity => z.map(|_| 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "relu" => Some(Activation::Relu),
            "tanh" => Some(Activation::Tanh),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub weights: Matrix, // fan_in x fan_out
    pub bias: Matrix,    // 1 x fan_out
    pub activation: Activation,
}

impl DenseLayer {
    pub fn zeroed(fan_in: usize, fan_out: usize, activation: Activation) -> Self {
        DenseLayer {
            weights: Matrix::zeros(fan_in, fan_out),
            bias: Matrix::zeros(1, fan_out),
            activation,
        }
    }

    pub fn fan_in(&self) -> usize {
        self.weights.rows()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.cols()
    }

    pub fn param_count(&self) -> usize {
        self.fan_in() * self.fan_out() + self.fan_out()
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
}

impl Network {
    pub fn input_width(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().unwrap().fan_out()
    }

    /// Per-layer parameter counts and their total.
    pub fn param_count(&self) -> (Vec<usize>, usize) {
        let per: Vec<usize> = self.layers.iter().map(DenseLayer::param_count).collect();
        let total = per.iter().sum();
        (per, total)
    }
}

/// The fixed architecture: Dense(n_features -> 5, ReLU), Dense(5 -> 5, Tanh),
/// Dense(5 -> 1, Identity). The linear output node serves the regression task.
/// Weights are zero placeholders until `init_network`.
pub fn paper_architecture(n_features: usize) -> Result<Network> {
    if n_features == 0 {
        return Err(Error::Argument("n_features must be at least 1".into()));
    }
    Ok(Network {
        layers: vec![
            DenseLayer::zeroed(n_features, 5, Activation::Relu),
            DenseLayer::zeroed(5, 5, Activation::Tanh),
            DenseLayer::zeroed(5, 1, Activation::Identity),
        ],
    })
}

/// Glorot-uniform initialization: weights ~ uniform(-s, s) with
/// s = sqrt(6 / (fan_in + fan_out)); biases zero.
pub fn init_network(net: &Network, rng: &mut Rng) -> Network {
    let layers = net
        .layers
        .iter()
        .map(|layer| {
            let (fan_in, fan_out) = (layer.fan_in(), layer.fan_out());
            let s = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let values: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| rng.uniform(-s, s).expect("s > 0"))
                .collect();
            DenseLayer {
                weights: Matrix::from_vec(fan_in, fan_out, values).expect("length matches"),
                bias: Matrix::zeros(1, fan_out),
                activation: layer.activation,
            }
        })
        .collect();
    Network { layers }
}

/// Intermediates retained by `forward` for one batch, consumed by `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Matrix,
    pub pre_activations: Vec<Matrix>,  // Z_i per layer
    pub post_activations: Vec<Matrix>, // A_i per layer
}

pub fn forward(net: &Network, batch: &Matrix) -> Result<(Matrix, ForwardCache)> {
    if batch.cols() != net.input_width() {
        return Err(Error::Shape {
            context: "forward input width",
            left_rows: batch.rows(),
            left_cols: batch.cols(),
            right_rows: net.input_width(),
            right_cols: net.layers[0].fan_out(),
        });
    }
    let mut pre = Vec::with_capacity(net.layers.len());
    let mut post = Vec::with_capacity(net.layers.len());
    let mut current = batch.clone();
    for layer in &net.layers {
        let z = add_row_broadcast(&matmul(&current, &layer.weights)?, &layer.bias)?;
        let a = layer.activation.apply(&z);
        pre.push(z);
        current = a.clone();
        post.push(a);
    }
    Ok((
        current,
        ForwardCache {
            input: batch.clone(),
            pre_activations: pre,
            post_activations: post,
        },
    ))
}

/// Per-layer gradients, shape-congruent with the network.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub d_weights: Vec<Matrix>,
    pub d_bias: Vec<Matrix>,
}

/// Reverse-mode backprop. `d_output` is dL/d(final post-activation).
pub fn backward(net: &Network, cache: &ForwardCache, d_output: &Matrix) -> Result<Gradients> {
    let depth = net.layers.len();
    let last = cache
        .post_activations
        .last()
        .expect("cache produced by forward");
    if d_output.rows() != last.rows() || d_output.cols() != last.cols() {
        return Err(Error::Shape {
            context: "backward output gradient",
            left_rows: d_output.rows(),
            left_cols: d_output.cols(),
            right_rows: last.rows(),
            right_cols: last.cols(),
        });
    }
    let mut d_weights = vec![Matrix::zeros(1, 1); depth];
    let mut d_bias = vec![Matrix::zeros(1, 1); depth];
    let mut d_post = d_output.clone();
    for l in (0..depth).rev() {
        let layer = &net.layers[l];
        let d_pre = d_post.hadamard(&layer.activation.grad(&cache.pre_activations[l]))?;
        let layer_input = if l == 0 {
            &cache.input
        } else {
            &cache.post_activations[l - 1]
        };
        d_weights[l] = matmul(&layer_input.transpose(), &d_pre)?;
        d_bias[l] = d_pre.col_sums();
        if l > 0 {
            d_post = matmul(&d_pre, &layer.weights.transpose())?;
        }
    }
    Ok(Gradients { d_weights, d_bias })
}
