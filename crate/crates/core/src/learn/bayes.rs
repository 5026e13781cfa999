use serde::{Deserialize, Serialize};

use super::{NaiveBayesParams, Prediction};
use crate::record::{UserType, NUM_CLASSES};

/// Gaussian naive Bayes. Every class variance gets `var_smoothing` times the
/// largest per-feature variance of the training set added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

fn mean_var(rows: &[&Vec<f64>], dim: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; dim];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r.iter()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dim];
    for r in rows {
        for ((v, x), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
            *v += (x - m).powi(2);
        }
    }
    var.iter_mut().for_each(|v| *v /= n);
    (mean, var)
}

impl GaussianNb {
    pub fn fit(data: &[Vec<f64>], labels: &[UserType], params: &NaiveBayesParams) -> GaussianNb {
        let dim = data.first().map_or(0, Vec::len);
        let all: Vec<&Vec<f64>> = data.iter().collect();
        let (_, overall_var) = mean_var(&all, dim);
        let mut epsilon = params.var_smoothing * overall_var.iter().cloned().fold(0.0, f64::max);
        if epsilon <= 0.0 {
            epsilon = params.var_smoothing;
        }

        let mut nb = GaussianNb {
            log_priors: vec![f64::NEG_INFINITY; NUM_CLASSES],
            means: vec![vec![0.0; dim]; NUM_CLASSES],
            variances: vec![vec![1.0; dim]; NUM_CLASSES],
        };
        for class in UserType::ALL {
            let rows: Vec<&Vec<f64>> = data
                .iter()
                .zip(labels)
                .filter(|(_, y)| **y == class)
                .map(|(x, _)| x)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let (mean, var) = mean_var(&rows, dim);
            let c = class.index();
            nb.log_priors[c] = (rows.len() as f64 / data.len() as f64).ln();
            nb.means[c] = mean;
            nb.variances[c] = var.into_iter().map(|v| v + epsilon).collect();
        }
        nb
    }

    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> [f64; NUM_CLASSES] {
        std::array::from_fn(|c| {
            let mut ll = self.log_priors[c];
            for ((xj, m), v) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                ll -= 0.5 * (2.0 * std::f64::consts::PI * v).ln() + (xj - m).powi(2) / (2.0 * v);
            }
            ll
        })
    }

    /// Scores are posterior probabilities.
    pub fn predict(&self, x: &[f64]) -> Prediction {
        let jll = self.joint_log_likelihood(x);
        let mut p = super::linear::softmax(jll);
        if p.iter().any(|v| !v.is_finite()) {
            p = [0.0; NUM_CLASSES];
        }
        let mut pred = Prediction::argmax(jll);
        pred.scores = p;
        pred
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use UserType::*;

    #[test]
    fn matches_hand_computed_bayes_rule() {
        // Two classes, one feature: Male at {0, 2}, Female at {10, 12}.
        let data = vec![vec![0.0], vec![2.0], vec![10.0], vec![12.0]];
        let labels = [Male, Male, Female, Female];
        let params = NaiveBayesParams { var_smoothing: 1e-9 };
        let nb = GaussianNb::fit(&data, &labels, &params);

        // Hand values: means 1 and 11, within-class variance 1, overall
        // variance 26 so epsilon = 2.6e-8, priors 1/2 each.
        let var = 1.0 + 26.0 * 1e-9;
        assert!((nb.means[0][0] - 1.0).abs() < 1e-15);
        assert!((nb.means[1][0] - 11.0).abs() < 1e-15);
        assert!((nb.variances[0][0] - var).abs() < 1e-15);

        let density = |x: f64, m: f64| (-(x - m).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        for x in [-3.0, 1.0, 5.9, 6.1, 11.0, 20.0] {
            let pm = 0.5 * density(x, 1.0);
            let pf = 0.5 * density(x, 11.0);
            let expected = if pm >= pf { Male } else { Female };
            let got = nb.predict(&[x]);
            assert_eq!(got.label, expected, "x = {x}");
            if pm + pf > 0.0 {
                assert!((got.scores[0] - pm / (pm + pf)).abs() < 1e-9);
            }
        }
        // Organization never seen: zero posterior.
        assert_eq!(nb.predict(&[6.0]).scores[2], 0.0);
    }
}
