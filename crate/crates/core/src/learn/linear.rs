//! Linear multiclass scorers: one-vs-rest hinge-loss SVM and softmax
//! regression.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LogisticParams, Prediction, SvmParams};
use crate::record::{UserType, NUM_CLASSES};

/// One weight vector and bias per class; score = `w·x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearModel {
    fn zeros(dim: usize) -> LinearModel {
        LinearModel {
            weights: vec![vec![0.0; dim]; NUM_CLASSES],
            bias: vec![0.0; NUM_CLASSES],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights[0].len()
    }

    pub fn scores(&self, x: &[f64]) -> [f64; NUM_CLASSES] {
        std::array::from_fn(|c| dot(&self.weights[c], x) + self.bias[c])
    }
}

/// Pegasos: step `1/(λt)` on the L2-regularized hinge loss, one binary
/// problem per class. The bias is a weight on a constant 1 feature and is
/// regularized with the rest. Each epoch visits the samples in a fresh
/// seeded permutation.
pub fn fit_svm_ovr(data: &[Vec<f64>], labels: &[UserType], params: &SvmParams, seed: u64) -> LinearModel {
    let n = data.len();
    let dim = data.first().map_or(0, Vec::len);
    let lambda = params.lambda;
    let radius = 1.0 / lambda.sqrt();
    let mut model = LinearModel::zeros(dim);

    for class in UserType::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(class.index() as u64 + 1);
        let w = &mut model.weights[class.index()];
        let mut b = 0.0;
        let mut order: Vec<usize> = (0..n).collect();
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let y = if labels[i] == class { 1.0 } else { -1.0 };
                let margin = y * (dot(w, &data[i]) + b);
                let shrink = 1.0 - eta * lambda;
                if margin < 1.0 {
                    let step = eta * y;
                    for (wj, xj) in w.iter_mut().zip(&data[i]) {
                        *wj = *wj * shrink + step * xj;
                    }
                    b = b * shrink + step;
                } else {
                    w.iter_mut().for_each(|wj| *wj *= shrink);
                    b *= shrink;
                }
                let norm = (dot(w, w) + b * b).sqrt();
                if norm > radius {
                    let s = radius / norm;
                    w.iter_mut().for_each(|wj| *wj *= s);
                    b *= s;
                }
            }
        }
        model.bias[class.index()] = b;
    }
    model
}

pub fn softmax(scores: [f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps = scores.map(|s| (s - max).exp());
    let z: f64 = exps.iter().sum();
    exps.map(|e| e / z)
}

/// Multinomial logistic regression by full-batch gradient descent from zero
/// weights. Only the weights are L2-penalized.
pub fn fit_logistic(data: &[Vec<f64>], labels: &[UserType], params: &LogisticParams) -> LinearModel {
    let n = data.len() as f64;
    let dim = data.first().map_or(0, Vec::len);
    let mut model = LinearModel::zeros(dim);
    let mut grad_w = vec![vec![0.0; dim]; NUM_CLASSES];
    let mut grad_b;

    for _ in 0..params.iterations {
        grad_w.iter_mut().for_each(|g| g.iter_mut().for_each(|v| *v = 0.0));
        grad_b = [0.0; NUM_CLASSES];
        for (x, y) in data.iter().zip(labels) {
            let p = softmax(model.scores(x));
            for c in 0..NUM_CLASSES {
                let err = p[c] - if y.index() == c { 1.0 } else { 0.0 };
                grad_b[c] += err;
                for (g, xj) in grad_w[c].iter_mut().zip(x) {
                    *g += err * xj;
                }
            }
        }
        for c in 0..NUM_CLASSES {
            for (w, g) in model.weights[c].iter_mut().zip(&grad_w[c]) {
                *w -= params.step * (g / n + params.lambda * *w);
            }
            model.bias[c] -= params.step * grad_b[c] / n;
        }
    }
    model
}

pub fn predict_svm(model: &LinearModel, x: &[f64]) -> Prediction {
    Prediction::argmax(model.scores(x))
}

pub fn predict_logistic(model: &LinearModel, x: &[f64]) -> Prediction {
    Prediction::argmax(softmax(model.scores(x)))
}
