use serde::{Deserialize, Serialize};

use super::{Dataset, Prediction};
use crate::corpus::Label;
use crate::error::Error;

/// k-nearest neighbours under cosine distance.
///
/// Distance ties are broken by lower training index; a vote that is not a
/// strict spam majority is labelled legitimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "KNearestData", into = "KNearestData")]
pub struct KNearest {
    k: usize,
    dim: usize,
    vectors: Vec<Vec<(usize, f64)>>,
    labels: Vec<Label>,
    norms: Vec<f64>,
    /// Per feature, `(training index, value)` for nonzero entries.
    postings: Vec<Vec<(u32, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct KNearestData {
    k: usize,
    dim: usize,
    vectors: Vec<Vec<(usize, f64)>>,
    labels: Vec<Label>,
}

impl From<KNearest> for KNearestData {
    fn from(m: KNearest) -> Self {
        Self {
            k: m.k,
            dim: m.dim,
            vectors: m.vectors,
            labels: m.labels,
        }
    }
}

impl TryFrom<KNearestData> for KNearest {
    type Error = Error;

    fn try_from(d: KNearestData) -> Result<Self, Error> {
        if d.vectors.len() != d.labels.len() || d.k == 0 {
            return Err(Error::ModelFormat("inconsistent kNN payload".into()));
        }
        if d.vectors.iter().flatten().any(|&(j, _)| j >= d.dim) {
            return Err(Error::ModelFormat("kNN feature index out of range".into()));
        }
        Ok(Self::build(d.k, d.dim, d.vectors, d.labels))
    }
}

impl PartialEq for KNearest {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.dim == other.dim
            && self.vectors == other.vectors
            && self.labels == other.labels
    }
}

fn norm(x: &[(usize, f64)]) -> f64 {
    x.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
}

impl KNearest {
    fn build(k: usize, dim: usize, vectors: Vec<Vec<(usize, f64)>>, labels: Vec<Label>) -> Self {
        let norms = vectors.iter().map(|v| norm(v)).collect();
        let mut postings = vec![Vec::new(); dim];
        for (i, v) in vectors.iter().enumerate() {
            for &(j, x) in v {
                postings[j].push((i as u32, x));
            }
        }
        Self {
            k,
            dim,
            vectors,
            labels,
            norms,
            postings,
        }
    }

    pub(crate) fn fit(data: &Dataset, k: usize) -> Self {
        Self::build(k, data.dim, data.rows.clone(), data.labels.clone())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Cosine distance from `x` to every training vector. A zero vector on
    /// either side has similarity 0.
    pub fn distances(&self, x: &[(usize, f64)]) -> Vec<f64> {
        let mut dots = vec![0.0; self.vectors.len()];
        for &(j, q) in x {
            for &(i, v) in &self.postings[j] {
                dots[i as usize] += q * v;
            }
        }
        let qn = norm(x);
        dots.iter()
            .zip(&self.norms)
            .map(|(&dot, &n)| {
                if qn == 0.0 || n == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (qn * n)
                }
            })
            .collect()
    }

    /// Indices of the `k` nearest training vectors, nearest first.
    pub fn neighbours(&self, x: &[(usize, f64)]) -> Vec<usize> {
        let dist = self.distances(x);
        let mut idx: Vec<usize> = (0..dist.len()).collect();
        let by_distance = |a: &usize, b: &usize| dist[*a].total_cmp(&dist[*b]).then(a.cmp(b));
        let k = self.k.min(idx.len());
        if k < idx.len() {
            idx.select_nth_unstable_by(k, by_distance);
            idx.truncate(k);
        }
        idx.sort_by(by_distance);
        idx
    }

    pub(crate) fn predict(&self, x: &[(usize, f64)]) -> Prediction {
        let neighbours = self.neighbours(x);
        let spam = neighbours
            .iter()
            .filter(|&&i| self.labels[i] == Label::Spam)
            .count();
        let n = neighbours.len();
        Prediction {
            label: if 2 * spam > n {
                Label::Spam
            } else {
                Label::Legitimate
            },
            score: spam as f64 / n as f64,
        }
    }
}
