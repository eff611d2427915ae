use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ParamVector;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation's output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Layer {
    n_in: usize,
    n_out: usize,
    /// Row-major `n_out × n_in`.
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl Layer {
    fn n_params(&self) -> usize {
        self.n_out * (self.n_in + 1)
    }

    fn affine(&self, input: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.n_in)
            .zip(&self.biases)
            .map(|(row, b)| b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>())
            .collect()
    }
}

/// A fully connected network: tanh on hidden layers, linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
}

/// Layer-by-layer outputs of a forward pass, kept for differentiation.
/// `outputs[0]` is the input; `outputs[k + 1]` is the output of layer `k`.
#[derive(Debug, Clone)]
pub struct Trace {
    pub outputs: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.outputs.last().expect("trace always holds the input")
    }
}

impl Mlp {
    /// All-zero network with the given layer sizes, e.g. `[4, 32, 32, 6]`.
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| Layer {
                n_in: w[0],
                n_out: w[1],
                weights: vec![0.0; w[0] * w[1]],
                biases: vec![0.0; w[1]],
                activation: if k == last {
                    Activation::Identity
                } else {
                    Activation::Tanh
                },
            })
            .collect();
        Self { layers }
    }

    /// Orthogonal weight initialization with zero biases. Hidden layers use
    /// unit gain; the output layer is scaled by `output_gain`.
    pub fn orthogonal<R: Rng + ?Sized>(sizes: &[usize], output_gain: f64, rng: &mut R) -> Self {
        let mut mlp = Self::zeros(sizes);
        let last = mlp.layers.len() - 1;
        for (k, layer) in mlp.layers.iter_mut().enumerate() {
            let gain = if k == last { output_gain } else { 1.0 };
            layer.weights = orthogonal_matrix(layer.n_out, layer.n_in, gain, rng);
        }
        mlp
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.layers[0].n_in];
        s.extend(self.layers.iter().map(|l| l.n_out));
        s
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map(|l| l.n_out).unwrap_or(0)
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(Layer::n_params).sum()
    }

    pub fn params(&self) -> ParamVector {
        let mut out = Vec::with_capacity(self.n_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.biases);
        }
        ParamVector(out)
    }

    /// Loads parameters from the front of `flat`; returns how many were read.
    pub fn set_params(&mut self, flat: &[f64]) -> Result<usize> {
        let n = self.n_params();
        if flat.len() < n {
            return Err(Error::InputDimension {
                expected: n,
                actual: flat.len(),
            });
        }
        let mut at = 0;
        for l in &mut self.layers {
            let (w, b) = (l.weights.len(), l.biases.len());
            l.weights.copy_from_slice(&flat[at..at + w]);
            at += w;
            l.biases.copy_from_slice(&flat[at..at + b]);
            at += b;
        }
        Ok(at)
    }

    /// Replaces the weights of one layer (row-major `out × in`).
    pub fn set_layer(&mut self, k: usize, weights: Vec<f64>, biases: Vec<f64>) {
        let l = &mut self.layers[k];
        assert_eq!(weights.len(), l.n_in * l.n_out);
        assert_eq!(biases.len(), l.n_out);
        l.weights = weights;
        l.biases = biases;
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut x = input.to_vec();
        for l in &self.layers {
            x = l.affine(&x).into_iter().map(|z| l.activation.apply(z)).collect();
        }
        Ok(x)
    }

    pub fn trace(&self, input: &[f64]) -> Result<Trace> {
        self.check_input(input)?;
        let mut outputs = Vec::with_capacity(self.layers.len() + 1);
        outputs.push(input.to_vec());
        for l in &self.layers {
            let y: Vec<f64> = l
                .affine(outputs.last().unwrap())
                .into_iter()
                .map(|z| l.activation.apply(z))
                .collect();
            outputs.push(y);
        }
        Ok(Trace { outputs })
    }

    /// Reverse mode: accumulates `d_output^T · ∂output/∂params` into `grad`.
    pub fn backward(&self, trace: &Trace, d_output: &[f64], grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.n_params());
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for l in &self.layers {
            offsets.push(at);
            at += l.n_params();
        }

        let mut delta = d_output.to_vec();
        for (k, l) in self.layers.iter().enumerate().rev() {
            let y = &trace.outputs[k + 1];
            for (d, yj) in delta.iter_mut().zip(y) {
                *d *= l.activation.derivative_from_output(*yj);
            }
            let x = &trace.outputs[k];
            let (gw, rest) = grad[offsets[k]..].split_at_mut(l.n_in * l.n_out);
            for (j, dj) in delta.iter().enumerate() {
                let row = &mut gw[j * l.n_in..(j + 1) * l.n_in];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += dj * xi;
                }
                rest[j] += dj;
            }
            if k > 0 {
                let mut prev = vec![0.0; l.n_in];
                for (row, dj) in l.weights.chunks_exact(l.n_in).zip(&delta) {
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += w * dj;
                    }
                }
                delta = prev;
            }
        }
    }

    /// Forward mode: derivative of the output along the parameter direction
    /// `tangent` (same layout as [`Mlp::params`]).
    pub fn jvp(&self, trace: &Trace, tangent: &[f64]) -> Vec<f64> {
        debug_assert_eq!(tangent.len(), self.n_params());
        let mut at = 0;
        let mut dx = vec![0.0; self.input_dim()];
        for (k, l) in self.layers.iter().enumerate() {
            let tw = &tangent[at..at + l.n_in * l.n_out];
            let tb = &tangent[at + l.n_in * l.n_out..at + l.n_params()];
            at += l.n_params();
            let x = &trace.outputs[k];
            let y = &trace.outputs[k + 1];
            dx = (0..l.n_out)
                .map(|j| {
                    let w = &l.weights[j * l.n_in..(j + 1) * l.n_in];
                    let dw = &tw[j * l.n_in..(j + 1) * l.n_in];
                    let dz = tb[j]
                        + dw.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                        + w.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>();
                    dz * l.activation.derivative_from_output(y[j])
                })
                .collect();
        }
        dx
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::InputDimension {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        Ok(())
    }
}

fn orthogonal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Vec<f64> {
    // QR of a tall Gaussian matrix gives orthonormal columns; transpose when wide.
    let (m, n) = if rows >= cols { (rows, cols) } else { (cols, rows) };
    let a = DMatrix::<f64>::from_fn(m, n, |_, _| rng.sample(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let q = if rows >= cols { q } else { q.transpose() };
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(gain * q[(i, j)]);
        }
    }
    out
}

/// Layer outputs for a batch of inputs, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchTrace {
    outputs: Vec<DMatrix<f64>>,
}

impl BatchTrace {
    pub fn output(&self) -> &DMatrix<f64> {
        self.outputs.last().expect("trace holds at least the input")
    }

    pub fn len(&self) -> usize {
        self.outputs[0].nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Layer {
    fn weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_out, self.n_in, &self.weights)
    }
}

fn add_row_vector(m: &mut DMatrix<f64>, v: &[f64]) {
    for (j, b) in v.iter().enumerate() {
        m.column_mut(j).add_scalar_mut(*b);
    }
}

fn scale_by_derivative(m: &mut DMatrix<f64>, y: &DMatrix<f64>, act: Activation) {
    if act == Activation::Identity {
        return;
    }
    m.zip_apply(y, |d, yv| *d *= act.derivative_from_output(yv));
}

/// Batched counterparts of [`Mlp::trace`], [`Mlp::jvp`] and [`Mlp::backward`],
/// with samples as matrix rows.
impl Mlp {
    pub fn trace_batch(&self, inputs: &DMatrix<f64>) -> Result<BatchTrace> {
        if inputs.ncols() != self.input_dim() {
            return Err(Error::InputDimension {
                expected: self.input_dim(),
                actual: inputs.ncols(),
            });
        }
        let mut outputs = Vec::with_capacity(self.layers.len() + 1);
        outputs.push(inputs.clone());
        for l in &self.layers {
            let mut z = outputs.last().unwrap() * l.weight_matrix().transpose();
            add_row_vector(&mut z, &l.biases);
            if l.activation != Activation::Identity {
                z.apply(|v| *v = l.activation.apply(*v));
            }
            outputs.push(z);
        }
        Ok(BatchTrace { outputs })
    }

    pub fn jvp_batch(&self, trace: &BatchTrace, tangent: &[f64]) -> DMatrix<f64> {
        debug_assert_eq!(tangent.len(), self.n_params());
        let mut at = 0;
        let mut dx: Option<DMatrix<f64>> = None;
        for (k, l) in self.layers.iter().enumerate() {
            let nw = l.n_in * l.n_out;
            let dw = DMatrix::from_row_slice(l.n_out, l.n_in, &tangent[at..at + nw]);
            let db = &tangent[at + nw..at + l.n_params()];
            at += l.n_params();
            let mut dz = &trace.outputs[k] * dw.transpose();
            if let Some(prev) = &dx {
                dz.gemm(1.0, prev, &l.weight_matrix().transpose(), 1.0);
            }
            add_row_vector(&mut dz, db);
            scale_by_derivative(&mut dz, &trace.outputs[k + 1], l.activation);
            dx = Some(dz);
        }
        dx.expect("network has at least one layer")
    }

    /// Accumulates `Σ_rows d_outputᵀ · ∂output/∂params` into `grad`.
    pub fn backward_batch(&self, trace: &BatchTrace, d_output: &DMatrix<f64>, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), self.n_params());
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for l in &self.layers {
            offsets.push(at);
            at += l.n_params();
        }
        let mut delta = d_output.clone();
        for (k, l) in self.layers.iter().enumerate().rev() {
            scale_by_derivative(&mut delta, &trace.outputs[k + 1], l.activation);
            let gw = delta.transpose() * &trace.outputs[k];
            let (gw_out, gb_out) = grad[offsets[k]..offsets[k] + l.n_params()].split_at_mut(l.n_in * l.n_out);
            for j in 0..l.n_out {
                for i in 0..l.n_in {
                    gw_out[j * l.n_in + i] += gw[(j, i)];
                }
                gb_out[j] += delta.column(j).sum();
            }
            if k > 0 {
                delta = &delta * l.weight_matrix();
            }
        }
    }
}
