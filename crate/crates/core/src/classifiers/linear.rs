use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, Hyperparams};
use crate::corpus::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearLoss {
    Hinge,
    Logistic,
}

/// `w . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LinearModel {
    /// Stochastic subgradient descent on the L2-regularized loss with step
    /// size `1 / (lambda * t)`. The bias is an extra weight on a constant
    /// input of 1 and is regularized with the rest.
    ///
    /// The weight vector is kept as `scale * v` so the per-step shrink
    /// `(1 - 1/t)` costs O(1) instead of O(dim).
    pub(crate) fn fit(data: &Dataset, loss: LinearLoss, hp: &Hyperparams) -> Self {
        let lambda = hp.lambda;
        let mut v = vec![0.0; data.dim];
        let mut v_bias = 0.0;
        let mut scale = 1.0;
        let mut order: Vec<usize> = (0..data.rows.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let mut t = 0u64;

        for _ in 0..hp.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let row = &data.rows[i];
                let y = if data.labels[i] == Label::Spam {
                    1.0
                } else {
                    -1.0
                };
                let raw: f64 = row.iter().map(|&(j, x)| v[j] * x).sum::<f64>() + v_bias;
                let margin = y * scale * raw;

                let eta = 1.0 / (lambda * t as f64);
                let shrink = 1.0 - 1.0 / t as f64;
                if shrink == 0.0 {
                    v.iter_mut().for_each(|w| *w = 0.0);
                    v_bias = 0.0;
                    scale = 1.0;
                } else {
                    scale *= shrink;
                }

                let grad = match loss {
                    LinearLoss::Hinge => {
                        if margin < 1.0 {
                            y
                        } else {
                            0.0
                        }
                    }
                    LinearLoss::Logistic => y * sigmoid(-margin),
                };
                if grad != 0.0 {
                    let step = eta * grad / scale;
                    for &(j, x) in row {
                        v[j] += step * x;
                    }
                    v_bias += step;
                }

                if scale < 1e-9 {
                    v.iter_mut().for_each(|w| *w *= scale);
                    v_bias *= scale;
                    scale = 1.0;
                }
            }
        }

        Self {
            weights: v.iter().map(|w| w * scale).collect(),
            bias: v_bias * scale,
        }
    }

    pub fn margin(&self, x: &[(usize, f64)]) -> f64 {
        x.iter().map(|&(j, v)| self.weights[j] * v).sum::<f64>() + self.bias
    }
}
