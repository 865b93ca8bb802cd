use serde::{Deserialize, Serialize};

use super::{Dataset, Prediction};
use crate::corpus::Label;
use crate::error::{Error, Result};

/// Multinomial naive Bayes with additive (Laplace) smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub alpha: f64,
    /// `[spam, legitimate]`
    pub log_prior: [f64; 2],
    /// Per class, `ln P(feature | class)` for every input dimension.
    pub log_likelihood: [Vec<f64>; 2],
}

fn slot(label: Label) -> usize {
    match label {
        Label::Spam => 0,
        Label::Legitimate => 1,
    }
}

impl NaiveBayes {
    pub(crate) fn fit(data: &Dataset, alpha: f64) -> Result<Self> {
        let mut docs = [0usize; 2];
        let mut sums = [vec![0.0; data.dim], vec![0.0; data.dim]];
        for (row, &label) in data.rows.iter().zip(&data.labels) {
            let c = slot(label);
            docs[c] += 1;
            for &(j, v) in row {
                if v < 0.0 {
                    return Err(Error::InvalidParameter(
                        "naive Bayes needs non-negative feature values".into(),
                    ));
                }
                sums[c][j] += v;
            }
        }
        let n = data.rows.len() as f64;
        let log_prior = [(docs[0] as f64 / n).ln(), (docs[1] as f64 / n).ln()];
        let log_likelihood = sums.map(|counts| {
            let total: f64 = counts.iter().sum::<f64>() + alpha * data.dim as f64;
            counts.iter().map(|&c| ((c + alpha) / total).ln()).collect()
        });
        Ok(Self {
            alpha,
            log_prior,
            log_likelihood,
        })
    }

    /// Joint log score `ln P(c) + sum_j x_j ln P(j | c)` for both classes.
    pub fn joint_log_scores(&self, x: &[(usize, f64)]) -> [f64; 2] {
        let mut scores = self.log_prior;
        for (c, score) in scores.iter_mut().enumerate() {
            *score += x
                .iter()
                .map(|&(j, v)| v * self.log_likelihood[c][j])
                .sum::<f64>();
        }
        scores
    }

    /// Posterior probability of spam.
    pub fn spam_posterior(&self, x: &[(usize, f64)]) -> f64 {
        let [spam, ham] = self.joint_log_scores(x);
        1.0 / (1.0 + (ham - spam).exp())
    }

    pub(crate) fn predict(&self, x: &[(usize, f64)]) -> Prediction {
        let [spam, ham] = self.joint_log_scores(x);
        Prediction {
            label: if spam > ham {
                Label::Spam
            } else {
                Label::Legitimate
            },
            score: 1.0 / (1.0 + (ham - spam).exp()),
        }
    }
}
